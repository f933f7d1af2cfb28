#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace adrev::train {

inline constexpr double kMetricEpsilon = 1e-6;

double mae(std::span<const double> y, std::span<const double> yhat);
double mape(std::span<const double> y, std::span<const double> yhat, double eps = kMetricEpsilon);
double smape(std::span<const double> y, std::span<const double> yhat, double eps = kMetricEpsilon);

struct Metrics {
  double mae = 0.0;
  double mape = 0.0;
  double smape = 0.0;
};

Metrics compute_metrics(std::span<const double> y, std::span<const double> yhat);

/// Currency-scale errors of a set of forecasts.
struct MetricsReport {
  std::size_t horizon = 0;
  std::size_t windows = 0;
  Metrics aggregate;                           // over every (window, step)
  std::vector<Metrics> per_step;               // index h = step h + 1
  std::map<std::string, Metrics> per_publisher;
  Metrics publisher_average;                   // mean of the per-publisher values
};

/// Flat [windows, horizon] arrays of truth and forecast with the publisher of
/// each window.
MetricsReport build_report(std::span<const double> y, std::span<const double> yhat,
                           const std::vector<std::string>& publishers, std::size_t horizon);

}  // namespace adrev::train
