#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"
#include "features.hpp"

namespace adrev::models {

LstmForecaster::LstmForecaster(ModelConfig config) : ForecastModel(std::move(config)) {
  Rng rng(config_.seed);
  const std::size_t in = detail::one_hot_width(config_.schema.past_columns());
  lstm_ = nn::LstmStack::create(params_, "lstm", in, config_.hidden, config_.layers, config_.dropout, rng);
  head_ = nn::Linear::create(params_, "head", config_.hidden, config_.horizon, true, rng);
}

ForecastOutput LstmForecaster::forward(const data::Batch& batch, const ForwardOptions& options) const {
  check_batch(batch);
  const nn::ForwardContext ctx{options.training, options.rng};
  const Tensor inputs = detail::one_hot(batch.encoder, config_.schema.past_columns());
  const auto seq = nn::run_lstm(lstm_, inputs, batch.lookback, nn::zero_states(lstm_, batch.size), ctx);
  const Tensor last = dropout(seq.final.back().h, config_.dropout, ctx.training, ctx.rng);
  ForecastOutput out;
  out.predictions = reshape(head_(last), {batch.size, batch.horizon, 1});
  return out;
}

}  // namespace adrev::models
