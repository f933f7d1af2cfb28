#include "adrev/models/model.hpp"

#include <algorithm>

#include "adrev/error.hpp"
#include "adrev/losses.hpp"
#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"

namespace adrev::models {

namespace {

constexpr std::pair<ModelKind, std::string_view> kNames[] = {{ModelKind::kTft, "tft"},
                                                             {ModelKind::kLstm, "lstm"},
                                                             {ModelKind::kSeq2Seq, "seq2seq"},
                                                             {ModelKind::kDeepAr, "deepar"},
                                                             {ModelKind::kNBeats, "nbeats"}};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("model config: " + what);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected tft, lstm, seq2seq, deepar, nbeats)");
}

void ModelConfig::validate() const {
  require(hidden >= 1, "hidden must be at least 1");
  require(layers >= 1, "layers must be at least 1");
  require(horizon >= 1, "horizon must be at least 1");
  require(lookback >= 1, "lookback must be at least 1");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(decoder_dropout < 1.0, "decoder_dropout must be below 1");
  require(samples >= 1, "samples must be at least 1");
  require(schema.past_width() >= 1 && !schema.statics.empty(), "feature schema is empty");
  if (kind == ModelKind::kTft) {
    require(heads >= 1 && hidden % heads == 0, "hidden must be divisible by heads");
    require(!quantiles.empty(), "at least one quantile is required");
    for (double q : quantiles) require(q > 0.0 && q < 1.0, "quantiles must lie in (0, 1)");
    require(std::is_sorted(quantiles.begin(), quantiles.end()), "quantiles must be ascending");
  }
  if (kind == ModelKind::kNBeats) {
    require(nbeats_blocks >= 1 && nbeats_width >= 1 && nbeats_layers >= 1, "N-BEATS sizes must be positive");
  }
  if (kind == ModelKind::kSeq2Seq || kind == ModelKind::kDeepAr) {
    require(static_embedding >= 1, "static_embedding must be at least 1");
  }
}

std::vector<double> ForecastOutput::point() const {
  const std::size_t b = predictions.dim(0), tau = predictions.dim(1), q = predictions.dim(2);
  const std::size_t col = std::min(point_column, q - 1);
  std::vector<double> out(b * tau);
  const auto pv = predictions.data();
  for (std::size_t i = 0; i < b * tau; ++i) out[i] = pv[i * q + col];
  return out;
}

ForecastModel::ForecastModel(ModelConfig config) : config_(std::move(config)) { config_.validate(); }

Tensor ForecastModel::loss(const ForecastOutput& output, const data::Batch& batch) const {
  return mse_loss(batch.target, output.predictions);
}

void ForecastModel::check_batch(const data::Batch& batch) const {
  const auto& s = config_.schema;
  const bool ok = batch.lookback == config_.lookback && batch.horizon == config_.horizon &&
                  batch.encoder.dim(1) == s.past_width() && batch.decoder.dim(1) == s.known_width() &&
                  batch.statics.dim(1) == s.static_width();
  if (!ok) {
    throw ShapeError("batch layout (lookback " + std::to_string(batch.lookback) + ", horizon " +
                     std::to_string(batch.horizon) + ", widths " + std::to_string(batch.encoder.dim(1)) + "/" +
                     std::to_string(batch.decoder.dim(1)) + "/" + std::to_string(batch.statics.dim(1)) +
                     ") does not match the model schema");
  }
}

std::unique_ptr<ForecastModel> make_model(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::kTft:
      return std::make_unique<Tft>(config);
    case ModelKind::kLstm:
      return std::make_unique<LstmForecaster>(config);
    case ModelKind::kSeq2Seq:
      return std::make_unique<Seq2Seq>(config);
    case ModelKind::kDeepAr:
      return std::make_unique<DeepAr>(config);
    case ModelKind::kNBeats:
      return std::make_unique<NBeats>(config);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace adrev::models
