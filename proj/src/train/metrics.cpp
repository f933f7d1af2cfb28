#include "adrev/train/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "adrev/error.hpp"

namespace adrev::train {

namespace {

void check(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw ShapeError("metrics: " + std::to_string(y.size()) + " targets vs " + std::to_string(yhat.size()) +
                     " forecasts");
  }
  if (y.empty()) throw ContractError("metrics: empty input");
}

}  // namespace

double mae(std::span<const double> y, std::span<const double> yhat) {
  check(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

double mape(std::span<const double> y, std::span<const double> yhat, double eps) {
  check(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]) / std::max(std::abs(y[i]), eps);
  return s / static_cast<double>(y.size());
}

double smape(std::span<const double> y, std::span<const double> yhat, double eps) {
  check(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += 2.0 * std::abs(y[i] - yhat[i]) / (std::abs(y[i]) + std::abs(yhat[i]) + eps);
  }
  return s / static_cast<double>(y.size());
}

Metrics compute_metrics(std::span<const double> y, std::span<const double> yhat) {
  return {mae(y, yhat), mape(y, yhat), smape(y, yhat)};
}

MetricsReport build_report(std::span<const double> y, std::span<const double> yhat,
                           const std::vector<std::string>& publishers, std::size_t horizon) {
  check(y, yhat);
  if (horizon == 0 || y.size() != publishers.size() * horizon) {
    throw ShapeError("metrics: " + std::to_string(y.size()) + " values do not form " +
                     std::to_string(publishers.size()) + " windows of horizon " + std::to_string(horizon));
  }
  MetricsReport report;
  report.horizon = horizon;
  report.windows = publishers.size();
  report.aggregate = compute_metrics(y, yhat);

  std::vector<double> ys, fs;
  for (std::size_t h = 0; h < horizon; ++h) {
    ys.clear();
    fs.clear();
    for (std::size_t w = 0; w < publishers.size(); ++w) {
      ys.push_back(y[w * horizon + h]);
      fs.push_back(yhat[w * horizon + h]);
    }
    report.per_step.push_back(compute_metrics(ys, fs));
  }

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (std::size_t w = 0; w < publishers.size(); ++w) {
    auto& [gy, gf] = groups[publishers[w]];
    gy.insert(gy.end(), y.begin() + static_cast<long>(w * horizon), y.begin() + static_cast<long>((w + 1) * horizon));
    gf.insert(gf.end(), yhat.begin() + static_cast<long>(w * horizon),
              yhat.begin() + static_cast<long>((w + 1) * horizon));
  }
  for (const auto& [id, g] : groups) {
    const Metrics m = compute_metrics(g.first, g.second);
    report.per_publisher[id] = m;
    report.publisher_average.mae += m.mae;
    report.publisher_average.mape += m.mape;
    report.publisher_average.smape += m.smape;
  }
  const double n = static_cast<double>(groups.size());
  report.publisher_average.mae /= n;
  report.publisher_average.mape /= n;
  report.publisher_average.smape /= n;
  return report;
}

}  // namespace adrev::train
