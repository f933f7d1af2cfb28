#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adrev/data/windows.hpp"
#include "adrev/parameters.hpp"
#include "adrev/tensor.hpp"

namespace adrev::models {

enum class ModelKind { kTft, kLstm, kSeq2Seq, kDeepAr, kNBeats };

std::string_view to_string(ModelKind kind);
/// Accepts tft, lstm, seq2seq, deepar, nbeats; throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kTft;
  std::size_t hidden = 32;
  std::size_t decoder_hidden = 0;  // Seq2Seq decoder; 0 means equal to hidden
  std::size_t heads = 4;
  double dropout = 0.1;
  double decoder_dropout = -1.0;   // Seq2Seq decoder; negative means equal to dropout
  std::size_t layers = 1;
  std::size_t horizon = 7;
  std::size_t lookback = 89;
  std::vector<double> quantiles = {0.1, 0.5, 0.9};
  std::size_t static_embedding = 4;  // Seq2Seq and DeepAR categorical embeddings
  std::size_t nbeats_blocks = 3;
  std::size_t nbeats_width = 128;
  std::size_t nbeats_layers = 4;
  std::size_t samples = 100;  // DeepAR Monte Carlo paths
  std::uint64_t seed = 1;
  data::FeatureSchema schema;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  std::size_t decoder_width() const { return decoder_hidden ? decoder_hidden : hidden; }
  double decoder_dropout_rate() const { return decoder_dropout < 0.0 ? dropout : decoder_dropout; }
  std::size_t output_width() const { return kind == ModelKind::kTft ? quantiles.size() : 1; }
};

struct ForwardOptions {
  bool training = false;
  Rng* rng = nullptr;   // dropout masks and DeepAR sampling
  bool sample = false;  // DeepAR: ancestral sampling instead of teacher forcing
};

/// Model outputs for a batch. Predictions keep their graph; the
/// interpretability payload is detached and left undefined when a model does
/// not produce it.
struct ForecastOutput {
  Tensor predictions;      // [B, tau, Q], normalized target units
  Tensor attention;        // TFT: [B, T, T] with decode rows filled; Seq2Seq: [B, tau, k]
  Tensor encoder_weights;  // [B, k, m_enc]
  Tensor decoder_weights;  // [B, tau, m_dec]
  Tensor static_weights;   // [B, m_static]
  Tensor mean;             // DeepAR [B, tau], graph-attached under teacher forcing
  Tensor stddev;           // DeepAR [B, tau]
  std::size_t point_column = 0;  // quantile column used as the point forecast

  /// The point-forecast column as a flat [B, tau] array.
  std::vector<double> point() const;
  std::size_t quantile_count() const { return predictions.dim(2); }
};

class ForecastModel {
 public:
  explicit ForecastModel(ModelConfig config);
  virtual ~ForecastModel() = default;
  ForecastModel(const ForecastModel&) = delete;
  ForecastModel& operator=(const ForecastModel&) = delete;

  virtual ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const = 0;
  /// Training objective for an output produced under teacher forcing.
  virtual Tensor loss(const ForecastOutput& output, const data::Batch& batch) const;

  ModelKind kind() const { return config_.kind; }
  const ModelConfig& config() const { return config_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

 protected:
  /// Rejects batches whose layout disagrees with the configured schema.
  void check_batch(const data::Batch& batch) const;

  ModelConfig config_;
  ParameterSet params_;
};

std::unique_ptr<ForecastModel> make_model(const ModelConfig& config);

}  // namespace adrev::models
