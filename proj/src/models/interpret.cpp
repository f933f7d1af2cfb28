#include "adrev/models/interpret.hpp"

#include "adrev/error.hpp"

namespace adrev::models {

namespace {

void accumulate_weights(const Tensor& weights, std::vector<double>& sums) {
  const std::size_t m = weights.shape().back();
  const auto wv = weights.data();
  for (std::size_t i = 0; i < wv.size(); ++i) sums[i % m] += wv[i];
}

void normalize(std::vector<double>& v, double rows) {
  for (auto& x : v) x /= rows;
}

}  // namespace

Interpretation interpret(const ForecastModel& model, const data::WindowSet& windows, std::size_t batch_size) {
  if (model.kind() != ModelKind::kTft) {
    throw CapabilityError(std::string(to_string(model.kind())) + " models expose no selection weights or attention");
  }
  if (windows.empty()) throw ContractError("interpretation needs at least one window");
  const auto& schema = model.config().schema;
  const std::size_t k = windows.lookback, tau = windows.horizon, total = k + tau;

  Interpretation out;
  auto& imp = out.importance;
  for (const auto& c : schema.past_columns()) imp.encoder_names.push_back(c.name);
  for (const auto& c : schema.known) imp.decoder_names.push_back(c.name);
  for (const auto& c : schema.statics) imp.static_names.push_back(c.name);
  imp.encoder.assign(imp.encoder_names.size(), 0.0);
  imp.decoder.assign(imp.decoder_names.size(), 0.0);
  imp.statics.assign(imp.static_names.size(), 0.0);
  out.attention_profile.assign(total, 0.0);

  NoGradGuard no_grad;
  for (std::size_t begin = 0; begin < windows.size(); begin += batch_size) {
    const std::size_t count = std::min(batch_size, windows.size() - begin);
    const auto batch = data::collate(windows, begin, count);
    const auto result = model.forward(batch);
    accumulate_weights(result.encoder_weights, imp.encoder);
    accumulate_weights(result.decoder_weights, imp.decoder);
    accumulate_weights(result.static_weights, imp.statics);
    const auto av = result.attention.data();
    for (std::size_t b = 0; b < count; ++b)
      for (std::size_t row = k; row < total; ++row) {
        const double* a = av.data() + (b * total + row) * total;
        double mass = 0.0;
        for (std::size_t col = 0; col <= row; ++col) mass += a[col];
        for (std::size_t col = 0; col <= row; ++col) out.attention_profile[row - col] += a[col] / mass;
      }
  }
  const double n = static_cast<double>(windows.size());
  normalize(imp.encoder, n * k);
  normalize(imp.decoder, n * tau);
  normalize(imp.statics, n);
  normalize(out.attention_profile, n * tau);
  return out;
}

VariableImportance extract_variable_importance(const ForecastModel& model, const data::WindowSet& windows,
                                               std::size_t batch_size) {
  return interpret(model, windows, batch_size).importance;
}

std::vector<double> extract_attention_profile(const ForecastModel& model, const data::WindowSet& windows,
                                              std::size_t batch_size) {
  return interpret(model, windows, batch_size).attention_profile;
}

double quantile_crossing_rate(const Tensor& predictions) {
  const std::size_t q = predictions.dim(2);
  const std::size_t rows = predictions.dim(0) * predictions.dim(1);
  if (q < 2 || rows == 0) return 0.0;
  const auto pv = predictions.data();
  std::size_t crossed = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 1; j < q; ++j)
      if (pv[r * q + j] < pv[r * q + j - 1]) {
        ++crossed;
        break;
      }
  return static_cast<double>(crossed) / static_cast<double>(rows);
}

}  // namespace adrev::models
