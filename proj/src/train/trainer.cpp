#include "adrev/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "adrev/adam.hpp"
#include "adrev/data/date.hpp"
#include "adrev/error.hpp"
#include "adrev/log.hpp"
#include "adrev/synth/generator.hpp"
#include "adrev/text.hpp"

namespace adrev::train {

namespace {

std::vector<const data::WindowSample*> pointers(const data::WindowSet& windows) {
  std::vector<const data::WindowSample*> out;
  out.reserve(windows.size());
  for (const auto& w : windows.samples) out.push_back(&w);
  return out;
}

std::string num(double v) { return format_double(v); }

void metrics_row(std::ostream& out, const Metrics& m) {
  out << num(m.mae) << ',' << num(m.mape) << ',' << num(m.smape) << '\n';
}

}  // namespace

void TrainConfig::validate() const {
  if (batch == 0) throw ContractError("train: batch size must be at least 1");
  if (epochs == 0) throw ContractError("train: epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw ContractError("train: learning rate must be positive");
  if (clip_norm < 0.0) throw ContractError("train: clip norm must be non-negative");
}

double dataset_loss(const models::ForecastModel& model, const data::WindowSet& windows, std::size_t batch) {
  if (windows.empty()) throw ContractError("dataset_loss: no windows");
  NoGradGuard no_grad;
  double total = 0.0;
  for (std::size_t begin = 0; begin < windows.size(); begin += batch) {
    const std::size_t count = std::min(batch, windows.size() - begin);
    const data::Batch b = data::collate(windows, begin, count);
    total += model.loss(model.forward(b), b).item() * static_cast<double>(count);
  }
  return total / static_cast<double>(windows.size());
}

TrainHistory train(models::ForecastModel& model, const data::WindowSet& train_windows,
                   const data::WindowSet& val_windows, const TrainConfig& config) {
  config.validate();
  if (train_windows.empty()) throw ContractError("train: no training windows");
  const bool has_val = !val_windows.empty();
  if (!has_val) warn("train: no validation windows, selecting the best epoch by training loss");

  auto& params = model.parameters();
  Adam optimizer(params, config.learning_rate);
  Rng rng(config.seed);
  auto order = pointers(train_windows);

  TrainHistory history;
  {
    const double initial = dataset_loss(model, train_windows);
    history.epochs.push_back({0, initial, has_val ? dataset_loss(model, val_windows) : initial});
  }
  history.best_epoch = 0;
  history.best_val_loss = history.epochs[0].val_loss;
  auto best = params.snapshot();

  const models::ForwardOptions options{.training = true, .rng = &rng, .sample = false};
  std::size_t batch_index = 0;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch, ++batch_index) {
      const std::size_t count = std::min(config.batch, order.size() - begin);
      const data::Batch batch = data::collate(std::span(order).subspan(begin, count));
      params.zero_grad();
      const Tensor loss = model.loss(model.forward(batch, options), batch);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      backward(loss);
      if (config.clip_norm > 0.0) params.clip_grad_norm(config.clip_norm);
      optimizer.step();
      total += value * static_cast<double>(count);
    }
    const double train_loss = total / static_cast<double>(order.size());
    const double val_loss = has_val ? dataset_loss(model, val_windows) : train_loss;
    history.epochs.push_back({epoch, train_loss, val_loss});
    if (val_loss < history.best_val_loss) {
      history.best_val_loss = val_loss;
      history.best_epoch = epoch;
      best = params.snapshot();
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      history.stopped_early = true;
      break;
    }
  }
  params.restore(best);
  return history;
}

Forecasts predict(const models::ForecastModel& model, const data::WindowSet& windows,
                  const data::ScalerMap& scalers, std::uint64_t seed, std::size_t batch) {
  if (windows.empty()) throw ContractError("predict: no windows");
  NoGradGuard no_grad;
  Rng rng(seed);
  const bool sample = model.kind() == models::ModelKind::kDeepAr;
  const models::ForwardOptions options{.training = false, .rng = &rng, .sample = sample};

  Forecasts f;
  f.horizon = windows.horizon;
  for (std::size_t begin = 0; begin < windows.size(); begin += batch) {
    const std::size_t count = std::min(batch, windows.size() - begin);
    const data::Batch b = data::collate(windows, begin, count);
    const models::ForecastOutput out = model.forward(b, options);
    const std::vector<double> point = out.point();
    const std::size_t q = out.quantile_count();
    f.quantiles = q;
    const auto bands = out.predictions.data();
    for (std::size_t i = 0; i < count; ++i) {
      const data::WindowSample& w = windows.samples[begin + i];
      const data::PublisherScaler& s = scalers.at(w.publisher);
      f.publishers.push_back(w.publisher);
      f.anchors.push_back(w.anchor);
      for (std::size_t h = 0; h < f.horizon; ++h) {
        f.truth.push_back(data::inverse_transform(w.target[h], s.target));
        f.point.push_back(data::inverse_transform(point[i * f.horizon + h], s.target));
        for (std::size_t j = 0; j < q; ++j) {
          f.bands.push_back(data::inverse_transform(bands[(i * f.horizon + h) * q + j], s.target));
        }
      }
    }
  }
  return f;
}

Forecasts from_normalized(const data::WindowSet& windows, const std::vector<double>& normalized,
                          const data::ScalerMap& scalers) {
  if (normalized.size() != windows.size() * windows.horizon) {
    throw ShapeError("from_normalized: expected " + std::to_string(windows.size() * windows.horizon) +
                     " values, got " + std::to_string(normalized.size()));
  }
  Forecasts f;
  f.horizon = windows.horizon;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const data::WindowSample& w = windows.samples[i];
    const data::PublisherScaler& s = scalers.at(w.publisher);
    f.publishers.push_back(w.publisher);
    f.anchors.push_back(w.anchor);
    for (std::size_t h = 0; h < f.horizon; ++h) {
      f.truth.push_back(data::inverse_transform(w.target[h], s.target));
      f.point.push_back(data::inverse_transform(normalized[i * f.horizon + h], s.target));
    }
  }
  f.bands = f.point;
  return f;
}

std::vector<double> seasonal_naive(const data::WindowSet& windows, std::size_t period) {
  std::vector<double> out;
  out.reserve(windows.size() * windows.horizon);
  for (const auto& w : windows.samples) {
    const std::size_t width = w.encoder.size() / w.lookback;
    std::vector<double> history(w.lookback);
    for (std::size_t t = 0; t < w.lookback; ++t) history[t] = w.encoder[t * width];
    const auto f = synth::seasonal_naive_forecast(history, windows.horizon, period);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

MetricsReport evaluate(const Forecasts& forecasts) {
  return build_report(forecasts.truth, forecasts.point, forecasts.publishers, forecasts.horizon);
}

MetricsReport evaluate(const models::ForecastModel& model, const data::WindowSet& windows,
                       const data::ScalerMap& scalers, std::uint64_t seed) {
  return evaluate(predict(model, windows, scalers, seed));
}

double crossing_rate(const Forecasts& forecasts) {
  const std::size_t q = forecasts.quantiles;
  const std::size_t n = forecasts.bands.size() / q;
  if (n == 0) return 0.0;
  std::size_t crossed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < q; ++j) {
      if (forecasts.bands[i * q + j] < forecasts.bands[i * q + j - 1]) {
        ++crossed;
        break;
      }
    }
  }
  return static_cast<double>(crossed) / static_cast<double>(n);
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "epoch,train_loss,val_loss,best\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << num(e.train_loss) << ',' << num(e.val_loss) << ','
        << (e.epoch == history.best_epoch ? 1 : 0) << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  out << "model,horizon,MAE,MAPE,SMAPE\n";
  for (const auto& [model, report] : reports) {
    out << model << ',' << report.horizon << ',';
    metrics_row(out, report.aggregate);
  }
}

void write_step_metrics_csv(std::ostream& out, const std::string& model, const MetricsReport& report) {
  out << "model,step,MAE,MAPE,SMAPE\n";
  for (std::size_t h = 0; h < report.per_step.size(); ++h) {
    out << model << ',' << h + 1 << ',';
    metrics_row(out, report.per_step[h]);
  }
}

void write_publisher_metrics_csv(std::ostream& out, const std::string& model, const MetricsReport& report) {
  out << "model,publisher,MAE,MAPE,SMAPE\n";
  for (const auto& [id, m] : report.per_publisher) {
    out << model << ',' << id << ',';
    metrics_row(out, m);
  }
  out << model << ",mean,";
  metrics_row(out, report.publisher_average);
}

void write_forecasts_csv(std::ostream& out, const Forecasts& forecasts) {
  out << "publisher,anchor,step,truth,point";
  for (std::size_t j = 0; j < forecasts.quantiles; ++j) out << ",band" << j;
  out << '\n';
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    for (std::size_t h = 0; h < forecasts.horizon; ++h) {
      const std::size_t r = i * forecasts.horizon + h;
      out << forecasts.publishers[i] << ',' << data::format_date(forecasts.anchors[i]) << ',' << h + 1 << ','
          << num(forecasts.truth[r]) << ',' << num(forecasts.point[r]);
      for (std::size_t j = 0; j < forecasts.quantiles; ++j) out << ',' << num(forecasts.bands[r * forecasts.quantiles + j]);
      out << '\n';
    }
  }
}

}  // namespace adrev::train
