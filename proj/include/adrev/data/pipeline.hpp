#pragma once

#include <cstddef>
#include <optional>

#include "adrev/data/panel.hpp"
#include "adrev/data/preprocess.hpp"
#include "adrev/data/windows.hpp"

namespace adrev::data {

struct PipelineConfig {
  std::size_t lookback = 89;
  std::size_t horizon = 7;
  std::optional<Date> val_start;
  std::optional<Date> test_start;
  double min_avg_revenue = 5.0;
  std::size_t max_zero_run = 10;
  bool category_mean = true;
  bool exclude_self = false;
};

/// Everything needed to train on, or score against, a filtered panel.
struct PreparedData {
  Date val_start{};
  Date test_start{};
  SeriesPanel raw;  // after filtering and dropping unscalable publishers
  NormalizedPanel normalized;
  ScalerMap scalers;
  Vocabulary vocab;
  FeatureSchema schema;
  Splits splits;
};

/// When split dates are absent they default to 75% and 87.5% of the panel's
/// overall date span.
std::pair<Date, Date> resolve_split_dates(const SeriesPanel& panel, const PipelineConfig& config);

/// Filter, fit scalers on the training range, build features, window and split.
PreparedData prepare(const SeriesPanel& panel, const PipelineConfig& config);

/// Same pipeline reusing fitted scalers and vocabulary; publishers unknown to
/// either are skipped with a warning.
PreparedData prepare_with(const SeriesPanel& panel, const PipelineConfig& config, const ScalerMap& scalers,
                          const Vocabulary& vocab);

}  // namespace adrev::data
