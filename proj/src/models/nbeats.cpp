#include "adrev/error.hpp"
#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"
#include "features.hpp"

namespace adrev::models {

NBeats::NBeats(ModelConfig config) : ForecastModel(std::move(config)) {
  Rng rng(config_.seed);
  const std::size_t k = config_.lookback, w = config_.nbeats_width;
  for (std::size_t i = 0; i < config_.nbeats_blocks; ++i) {
    const std::string name = "block" + std::to_string(i);
    Block block;
    for (std::size_t l = 0; l < config_.nbeats_layers; ++l) {
      block.layers.push_back(nn::Linear::create(params_, name + ".fc" + std::to_string(l), l == 0 ? k : w, w, true, rng));
    }
    block.backcast = nn::Linear::create(params_, name + ".backcast", w, k, true, rng);
    block.forecast = nn::Linear::create(params_, name + ".forecast", w, config_.horizon, true, rng);
    blocks_.push_back(std::move(block));
  }
}

NBeats::Trace NBeats::run(const Tensor& history) const {
  if (history.rank() != 2 || history.dim(1) != config_.lookback) {
    throw ShapeError("nbeats: history " + shape_str(history.shape()) + " does not have lookback " +
                     std::to_string(config_.lookback));
  }
  Trace trace;
  Tensor residual = history;
  for (const auto& block : blocks_) {
    trace.residuals.push_back(residual);
    Tensor h = residual;
    for (const auto& layer : block.layers) h = relu(layer(h));
    const Tensor f = block.forecast(h);
    residual = sub(residual, block.backcast(h));
    trace.forecast = trace.block_forecasts.empty() ? f : add(trace.forecast, f);
    trace.block_forecasts.push_back(f);
  }
  trace.residuals.push_back(residual);
  return trace;
}

ForecastOutput NBeats::forward(const data::Batch& batch, const ForwardOptions&) const {
  check_batch(batch);
  ForecastOutput out;
  out.predictions = reshape(run(detail::target_history(batch)).forecast, {batch.size, batch.horizon, 1});
  return out;
}

}  // namespace adrev::models
