#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "adrev/data/panel.hpp"

namespace adrev::testing {

inline data::PublisherSeries make_series(std::string id, std::string category, data::Date start,
                                         std::vector<double> revenue, std::uint64_t seed = 1,
                                         std::string country = "DE") {
  data::PublisherSeries s;
  s.id = std::move(id);
  s.country = std::move(country);
  s.category = std::move(category);
  s.start = start;
  s.revenue = std::move(revenue);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 500.0);
  for (auto& cov : s.covariates) {
    cov.resize(s.revenue.size());
    for (auto& v : cov) v = std::floor(dist(rng));
  }
  return s;
}

inline std::vector<double> random_revenue(std::size_t n, std::mt19937_64& rng, double lo = 1.0, double hi = 200.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

/// Publishers with staggered starts and lengths over a few categories.
inline data::SeriesPanel random_panel(std::uint64_t seed, std::size_t publishers = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> offset(0, 20);
  std::uniform_int_distribution<int> length(60, 140);
  data::SeriesPanel panel;
  const data::Date base = data::parse_date("2019-01-01");
  for (std::size_t i = 0; i < publishers; ++i) {
    const auto start = base + std::chrono::days(offset(rng));
    panel.publishers.push_back(make_series("p" + std::to_string(i), "c" + std::to_string(i % 3), start,
                                           random_revenue(static_cast<std::size_t>(length(rng)), rng),
                                           seed * 31 + i));
  }
  return panel;
}

}  // namespace adrev::testing
