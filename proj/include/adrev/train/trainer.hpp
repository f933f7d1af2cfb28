#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "adrev/data/preprocess.hpp"
#include "adrev/data/windows.hpp"
#include "adrev/models/model.hpp"
#include "adrev/train/metrics.hpp"

namespace adrev::train {

struct TrainConfig {
  std::size_t batch = 32;
  std::size_t epochs = 5;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  double clip_norm = 1.0;  // 0 disables clipping
  std::size_t patience = 0;  // epochs without validation improvement before stopping; 0 never stops early

  /// Throws ContractError on batch == 0 or epochs == 0.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;  // epochs[0] holds the losses before the first update
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;

  double initial_train_loss() const { return epochs.front().train_loss; }
  double final_train_loss() const { return epochs.back().train_loss; }
};

/// Mean per-window loss of the model in evaluation mode.
double dataset_loss(const models::ForecastModel& model, const data::WindowSet& windows, std::size_t batch = 64);

/// Mini-batch Adam on shuffled training windows. Per-epoch training loss is
/// the mean over that epoch's batches; the parameters of the epoch with the
/// lowest validation loss are restored before returning. Without validation
/// windows the training loss is used for selection.
TrainHistory train(models::ForecastModel& model, const data::WindowSet& train_windows,
                   const data::WindowSet& val_windows, const TrainConfig& config);

/// Forecasts for a window set on the currency scale, flat [windows, horizon].
struct Forecasts {
  std::size_t horizon = 0;
  std::size_t quantiles = 1;
  std::vector<std::string> publishers;
  std::vector<data::Date> anchors;
  std::vector<double> truth;
  std::vector<double> point;
  std::vector<double> bands;  // [windows, horizon, quantiles]

  std::size_t size() const { return publishers.size(); }
};

/// Runs the model in evaluation mode. DeepAR forecasts come from ancestral
/// sampling driven by `seed`.
Forecasts predict(const models::ForecastModel& model, const data::WindowSet& windows,
                  const data::ScalerMap& scalers, std::uint64_t seed = 1, std::size_t batch = 64);

/// Wraps normalized point forecasts [windows, horizon] produced outside a model.
Forecasts from_normalized(const data::WindowSet& windows, const std::vector<double>& normalized,
                          const data::ScalerMap& scalers);

/// Repeats the last observed week of each window's target history.
std::vector<double> seasonal_naive(const data::WindowSet& windows, std::size_t period = 7);

MetricsReport evaluate(const Forecasts& forecasts);
MetricsReport evaluate(const models::ForecastModel& model, const data::WindowSet& windows,
                       const data::ScalerMap& scalers, std::uint64_t seed = 1);

/// Fraction of (window, step) pairs whose quantile bands are not ordered.
double crossing_rate(const Forecasts& forecasts);

void write_history_csv(std::ostream& out, const TrainHistory& history);
/// One aggregate row per named report: model,horizon,MAE,MAPE,SMAPE.
void write_metrics_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsReport>>& reports);
void write_step_metrics_csv(std::ostream& out, const std::string& model, const MetricsReport& report);
void write_publisher_metrics_csv(std::ostream& out, const std::string& model, const MetricsReport& report);
/// publisher,anchor,step,truth,point and one column per quantile band.
void write_forecasts_csv(std::ostream& out, const Forecasts& forecasts);

}  // namespace adrev::train
