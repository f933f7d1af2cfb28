#include <algorithm>
#include <cmath>
#include <random>

#include "adrev/error.hpp"
#include "adrev/losses.hpp"
#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"
#include "features.hpp"

namespace adrev::models {

namespace {

constexpr double kMinScale = 1e-6;

// Transposes a time-major column [tau * B] into batch-major [B, tau].
Tensor batch_rows(const Tensor& column, std::size_t tau, std::size_t b) {
  return transpose(reshape(column, {tau, b}));
}

}  // namespace

DeepAr::DeepAr(ModelConfig config) : ForecastModel(std::move(config)) {
  Rng rng(config_.seed);
  const auto& s = config_.schema;
  const std::size_t e = config_.static_embedding;
  for (const auto& st : s.statics) {
    static_tables_.push_back(
        params_.add_glorot("static_embedding." + st.name, {static_cast<std::size_t>(st.cardinality), e}, rng));
  }
  const std::size_t in = 1 + detail::one_hot_width(s.known) + e * s.statics.size();
  lstm_ = nn::LstmStack::create(params_, "lstm", in, config_.hidden, config_.layers, config_.dropout, rng);
  mean_head_ = nn::Linear::create(params_, "mean", config_.hidden, 1, true, rng);
  scale_head_ = nn::Linear::create(params_, "scale", config_.hidden, 1, true, rng);
}

Tensor DeepAr::step_inputs(const Tensor& previous, const Tensor& known, const Tensor& statics) const {
  const Tensor parts[] = {previous, known, statics};
  return concat(parts, 1);
}

DeepAr::Emission DeepAr::emit(const Tensor& hidden) const {
  return {mean_head_(hidden), add_scalar(softplus(scale_head_(hidden)), kMinScale), {}};
}

ForecastOutput DeepAr::forward(const data::Batch& batch, const ForwardOptions& options) const {
  check_batch(batch);
  const std::size_t b = batch.size, k = batch.lookback, tau = batch.horizon;
  ForecastOutput out;

  if (options.sample) {
    Rng fallback(config_.seed);
    Rng& rng = options.rng ? *options.rng : fallback;
    const std::size_t n = config_.samples;
    const auto paths = sample_paths(batch, n, rng);
    std::vector<double> median(b * tau), mean(b * tau), stddev(b * tau), draws(n);
    for (std::size_t i = 0; i < b * tau; ++i) {
      double sum = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        draws[s] = paths[s * b * tau + i];
        sum += draws[s];
      }
      const double m = sum / static_cast<double>(n);
      double var = 0.0;
      for (double v : draws) var += (v - m) * (v - m);
      std::sort(draws.begin(), draws.end());
      median[i] = n % 2 ? draws[n / 2] : 0.5 * (draws[n / 2 - 1] + draws[n / 2]);
      mean[i] = m;
      stddev[i] = std::sqrt(var / static_cast<double>(n));
    }
    out.predictions = Tensor::from({b, tau, 1}, std::move(median));
    out.mean = Tensor::from({b, tau}, std::move(mean));
    out.stddev = Tensor::from({b, tau}, std::move(stddev));
    return out;
  }

  // Teacher forcing: step p (1..k+tau-1) consumes z_{p-1} and the known
  // inputs of day p, and emits the distribution of z_p.
  const nn::ForwardContext ctx{options.training, options.rng};
  const auto& s = config_.schema;
  const std::size_t steps = k + tau - 1;
  const std::size_t past_w = s.past_width(), known_w = s.known_width();
  const Tensor history = detail::target_history(batch);
  const Tensor past_known =
      detail::one_hot(slice(batch.encoder, 1, past_w - known_w, known_w), s.known);
  const Tensor future_known = detail::one_hot(batch.decoder, s.known);
  const std::size_t kw = future_known.dim(1);

  std::vector<double> data(steps * b * (1 + kw));
  const auto hv = history.data(), tv = batch.target.data(), pk = past_known.data(), fk = future_known.data();
  for (std::size_t p = 1; p <= steps; ++p) {
    for (std::size_t j = 0; j < b; ++j) {
      double* row = data.data() + ((p - 1) * b + j) * (1 + kw);
      row[0] = p - 1 < k ? hv[j * k + (p - 1)] : tv[j * tau + (p - 1 - k)];
      const double* known = p < k ? pk.data() + (p * b + j) * kw : fk.data() + ((p - k) * b + j) * kw;
      std::copy_n(known, kw, row + 1);
    }
  }
  const Tensor observed = Tensor::from({steps * b, 1 + kw}, std::move(data));
  const Tensor statics = repeat_tile(detail::embed_statics(static_tables_, batch.statics), steps);
  const Tensor parts[] = {observed, statics};
  const auto seq = nn::run_lstm(lstm_, concat(parts, 1), steps, nn::zero_states(lstm_, b), ctx);
  const Tensor decode = slice_rows(seq.outputs, (k - 1) * b, tau * b);
  const auto emission = emit(decode);
  out.mean = batch_rows(emission.mean, tau, b);
  out.stddev = batch_rows(emission.stddev, tau, b);
  out.predictions = reshape(out.mean, {b, tau, 1});
  return out;
}

Tensor DeepAr::loss(const ForecastOutput& output, const data::Batch& batch) const {
  if (!output.mean.defined()) throw ContractError("deepar: loss needs a teacher-forced forward pass");
  return gaussian_nll(batch.target, output.mean, output.stddev);
}

std::vector<double> DeepAr::sample_paths(const data::Batch& batch, std::size_t samples, Rng& rng) const {
  if (samples < 1) throw ContractError("deepar: at least one sample path is required");
  check_batch(batch);
  NoGradGuard no_grad;
  const std::size_t b = batch.size, k = batch.lookback, tau = batch.horizon;
  const auto& s = config_.schema;
  const std::size_t past_w = s.past_width(), known_w = s.known_width();
  const Tensor history = detail::target_history(batch);
  const Tensor past_known = detail::one_hot(slice(batch.encoder, 1, past_w - known_w, known_w), s.known);
  const Tensor future_known = detail::one_hot(batch.decoder, s.known);
  const Tensor statics = detail::embed_statics(static_tables_, batch.statics);

  // Conditioning range: steps 1..k-1 over observed values.
  std::vector<nn::LstmState> state = nn::zero_states(lstm_, b);
  if (k > 1) {
    std::vector<Tensor> inputs;
    for (std::size_t p = 1; p < k; ++p) {
      inputs.push_back(step_inputs(slice(history, 1, p - 1, 1), slice_rows(past_known, p * b, b), statics));
    }
    state = nn::run_lstm(lstm_, concat(inputs, 0), k - 1, state, {}).final;
  }

  // Every path starts from the same conditioned state; paths are stacked
  // along the batch axis as sample-major blocks of B rows.
  for (auto& layer : state) layer = {repeat_tile(layer.h, samples), repeat_tile(layer.c, samples)};
  const Tensor statics_all = repeat_tile(statics, samples);
  Tensor previous = repeat_tile(slice(history, 1, k - 1, 1), samples);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> paths(samples * b * tau);
  for (std::size_t t = 0; t < tau; ++t) {
    const Tensor known = repeat_tile(slice_rows(future_known, t * b, b), samples);
    state = nn::run_lstm(lstm_, step_inputs(previous, known, statics_all), 1, state, {}).final;
    const auto emission = emit(state.back().h);
    std::vector<double> draw(samples * b);
    const auto mv = emission.mean.data(), sv = emission.stddev.data();
    for (std::size_t r = 0; r < samples * b; ++r) {
      draw[r] = mv[r] + sv[r] * normal(rng);
      paths[r * tau + t] = draw[r];
    }
    previous = Tensor::from({samples * b, 1}, std::move(draw));
  }
  return paths;
}

}  // namespace adrev::models
