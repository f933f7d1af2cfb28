#pragma once

#include <vector>

#include "adrev/models/model.hpp"
#include "adrev/nn/layers.hpp"

namespace adrev::models {

/// Temporal Fusion Transformer with quantile outputs.
class Tft final : public ForecastModel {
 public:
  explicit Tft(ModelConfig config);
  ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const override;
  Tensor loss(const ForecastOutput& output, const data::Batch& batch) const override;

 private:
  nn::VsnParams static_vsn_;
  nn::GrnParams context_selection_;
  nn::GrnParams context_hidden_;
  nn::GrnParams context_cell_;
  nn::GrnParams context_enrichment_;
  nn::VsnParams encoder_vsn_;
  nn::VsnParams decoder_vsn_;
  nn::LstmStack encoder_;
  nn::LstmStack decoder_;
  nn::GatedResidualParams lstm_gate_;
  nn::GrnParams enrichment_;
  nn::ImhaParams attention_;
  nn::GatedResidualParams attention_gate_;
  nn::GrnParams positionwise_;
  nn::GatedResidualParams output_gate_;
  nn::Linear head_;
};

/// Final hidden state of a stacked LSTM mapped linearly to the horizon.
class LstmForecaster final : public ForecastModel {
 public:
  explicit LstmForecaster(ModelConfig config);
  ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const override;

 private:
  nn::LstmStack lstm_;
  nn::Linear head_;
};

/// LSTM encoder-decoder with additive attention and recursive predictions.
class Seq2Seq final : public ForecastModel {
 public:
  explicit Seq2Seq(ModelConfig config);
  ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const override;

 private:
  std::vector<Tensor> static_tables_;
  nn::LstmStack encoder_;
  nn::LstmParams decoder_;
  std::optional<nn::Linear> bridge_hidden_;
  std::optional<nn::Linear> bridge_cell_;
  nn::BahdanauParams attention_;
  nn::Linear head_;
};

/// Autoregressive Gaussian LSTM sharing one network across the conditioning
/// and prediction ranges.
class DeepAr final : public ForecastModel {
 public:
  explicit DeepAr(ModelConfig config);
  ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const override;
  Tensor loss(const ForecastOutput& output, const data::Batch& batch) const override;

  /// Ancestral sampling: [samples, B, tau] draws on the normalized scale.
  std::vector<double> sample_paths(const data::Batch& batch, std::size_t samples, Rng& rng) const;

  nn::Linear& mean_head() { return mean_head_; }
  nn::Linear& scale_head() { return scale_head_; }

 private:
  struct Emission {
    Tensor mean;
    Tensor stddev;
    std::vector<nn::LstmState> state;
  };
  Tensor step_inputs(const Tensor& previous, const Tensor& known, const Tensor& statics) const;
  Emission emit(const Tensor& hidden) const;

  std::vector<Tensor> static_tables_;
  nn::LstmStack lstm_;
  nn::Linear mean_head_;
  nn::Linear scale_head_;
};

/// Generic N-BEATS: fully connected blocks with backcast/forecast heads.
class NBeats final : public ForecastModel {
 public:
  struct Block {
    std::vector<nn::Linear> layers;
    nn::Linear backcast;
    nn::Linear forecast;
  };
  struct Trace {
    Tensor forecast;                      // [B, tau]
    std::vector<Tensor> block_forecasts;  // each [B, tau]
    std::vector<Tensor> residuals;        // input to each block, then the final residual
  };

  explicit NBeats(ModelConfig config);
  ForecastOutput forward(const data::Batch& batch, const ForwardOptions& options = {}) const override;
  /// Runs the stack on a univariate history [B, k].
  Trace run(const Tensor& history) const;
  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
};

}  // namespace adrev::models
