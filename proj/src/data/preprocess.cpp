#include "adrev/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adrev/error.hpp"
#include "adrev/log.hpp"

namespace adrev::data {

namespace {

Scaler fit_scaler(const std::vector<double>& values, std::size_t n) {
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) mean += std::log1p(values[t]);
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = std::log1p(values[t]) - mean;
    var += d * d;
  }
  const double std = std::sqrt(var / static_cast<double>(n));
  // Rounding in the mean leaves a residue of a few ulps on constant input.
  return {mean, std <= 1e-12 * std::max(1.0, std::abs(mean)) ? 0.0 : std};
}

std::vector<double> scale(const std::vector<double>& values, const Scaler& s) {
  std::vector<double> out(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) out[t] = (std::log1p(values[t]) - s.mean) / s.std;
  return out;
}

NormalizedSeries normalize(const PublisherSeries& p, const PublisherScaler& s) {
  NormalizedSeries n;
  n.id = p.id;
  n.country = p.country;
  n.category = p.category;
  n.start = p.start;
  n.revenue = p.revenue;
  n.target = scale(p.revenue, s.target);
  for (std::size_t j = 0; j < kCovariateCount; ++j) n.unknown.push_back(scale(p.covariates[j], s.covariates[j]));
  return n;
}

std::vector<std::string> covariate_names() { return {kCovariateNames.begin(), kCovariateNames.end()}; }

int code_of(const std::vector<std::string>& vocab, std::string_view value, const char* field) {
  const auto it = std::lower_bound(vocab.begin(), vocab.end(), value);
  if (it == vocab.end() || *it != value) {
    throw LookupError(std::string("unknown ") + field + " '" + std::string(value) + "'");
  }
  return static_cast<int>(it - vocab.begin());
}

}  // namespace

const PublisherScaler& ScalerMap::at(std::string_view publisher) const {
  const auto it = by_publisher.find(publisher);
  if (it == by_publisher.end()) throw LookupError("no scaler for publisher '" + std::string(publisher) + "'");
  return it->second;
}

FitResult fit_transform(const SeriesPanel& panel, Date train_end) {
  FitResult result;
  result.panel.unknown_names = covariate_names();
  for (const auto& p : panel.publishers) {
    const auto days = (train_end - p.start).count();
    const std::size_t n = days <= 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(days), p.length());
    if (n < 2) {
      throw ContractError("publisher '" + p.id + "' has " + std::to_string(n) +
                          " training days before " + format_date(train_end) + "; at least 2 are required");
    }
    PublisherScaler s;
    s.target = fit_scaler(p.revenue, n);
    if (s.target.std == 0.0) {
      warn("dropping publisher '" + p.id + "': revenue has zero variance on the training range");
      continue;
    }
    for (std::size_t j = 0; j < kCovariateCount; ++j) {
      s.covariates[j] = fit_scaler(p.covariates[j], n);
      if (s.covariates[j].std == 0.0) s.covariates[j].std = 1.0;
    }
    result.panel.series.push_back(normalize(p, s));
    result.scalers.by_publisher.emplace(p.id, s);
  }
  if (result.panel.series.empty()) warn("no publishers left after scaling");
  return result;
}

NormalizedPanel apply_transform(const SeriesPanel& panel, const ScalerMap& scalers) {
  NormalizedPanel out;
  out.unknown_names = covariate_names();
  for (const auto& p : panel.publishers) out.series.push_back(normalize(p, scalers.at(p.id)));
  return out;
}

double inverse_transform(double z, const Scaler& scaler) {
  return std::max(0.0, std::expm1(z * scaler.std + scaler.mean));
}

double inverse_transform(double z, const ScalerMap& scalers, std::string_view publisher) {
  return inverse_transform(z, scalers.at(publisher).target);
}

void add_category_mean(NormalizedPanel& panel, bool exclude_self) {
  struct Accumulator {
    double sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, long>, Accumulator> totals;
  auto key = [](const NormalizedSeries& s, std::size_t t) {
    return std::make_pair(s.category, static_cast<long>(s.date_at(t).time_since_epoch().count()));
  };
  for (const auto& s : panel.series)
    for (std::size_t t = 0; t < s.length(); ++t) {
      auto& acc = totals[key(s, t)];
      acc.sum += s.target[t];
      ++acc.count;
    }
  for (auto& s : panel.series) {
    std::vector<double> column(s.length());
    for (std::size_t t = 0; t < s.length(); ++t) {
      const auto& acc = totals.at(key(s, t));
      if (!exclude_self) {
        column[t] = acc.sum / acc.count;
      } else {
        column[t] = acc.count > 1 ? (acc.sum - s.target[t]) / (acc.count - 1) : 0.0;
      }
    }
    s.unknown.push_back(std::move(column));
  }
  panel.unknown_names.emplace_back("category_mean_revenue");
}

CalendarRow calendar_row(Date date) {
  return {day_of_week(date), std::min(1.0, (day_of_year(date) - 1) / 365.0)};
}

std::vector<CalendarRow> calendar_features(const std::vector<Date>& dates) {
  std::vector<CalendarRow> out;
  out.reserve(dates.size());
  for (auto d : dates) out.push_back(calendar_row(d));
  return out;
}

Vocabulary Vocabulary::build(const SeriesPanel& panel) {
  std::set<std::string> ids, countries, categories;
  for (const auto& p : panel.publishers) {
    ids.insert(p.id);
    countries.insert(p.country);
    categories.insert(p.category);
  }
  return {{ids.begin(), ids.end()}, {countries.begin(), countries.end()}, {categories.begin(), categories.end()}};
}

std::array<int, 3> Vocabulary::encode(std::string_view id, std::string_view country,
                                      std::string_view category) const {
  return {code_of(publishers, id, "publisher"), code_of(countries, country, "country"),
          code_of(categories, category, "category")};
}

std::array<int, 3> Vocabulary::cardinalities() const {
  return {static_cast<int>(publishers.size()), static_cast<int>(countries.size()),
          static_cast<int>(categories.size())};
}

void assign_static_codes(NormalizedPanel& panel, const Vocabulary& vocab) {
  for (auto& s : panel.series) s.statics = vocab.encode(s.id, s.country, s.category);
}

}  // namespace adrev::data
