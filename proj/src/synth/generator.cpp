#include "adrev/synth/generator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <random>

#include "adrev/data/date.hpp"
#include "adrev/error.hpp"

namespace adrev::synth {

namespace {

// Weekday traffic high, weekend low; zero mean, peak magnitude 1.
constexpr std::array<double, 7> kWeeklyShape = {0.45, 0.6, 0.55, 0.4, 0.1, -0.85, -1.0};

constexpr std::array<const char*, 3> kCountries = {"DE", "US", "FR"};

// Independent stream per (purpose, publisher) so changing one knob does not
// reshuffle the draws used by another.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("generator: " + what);
}

}  // namespace

void GeneratorSpec::validate(std::size_t lookback, std::size_t horizon) const {
  require(publishers >= 1, "publishers must be at least 1");
  require(categories >= 1 && categories <= publishers, "categories must be in [1, publishers]");
  require(days >= lookback + horizon + 1, "days must be at least lookback + horizon + 1");
  require(category_strength >= 0.0 && category_strength <= 1.0, "category_strength must be in [0, 1]");
  require(std::abs(ar_phi) < 1.0, "ar_phi must be in (-1, 1)");
  require(std::abs(category_phi) < 1.0, "category_phi must be in (-1, 1)");
  require(slow_phi >= 0.0 && slow_phi <= 1.0, "slow_phi must be in [0, 1]");
  require(ctr_base > 0.0 && ctr_base < 1.0, "ctr_base must be in (0, 1)");
  require(cpc_base > 0.0, "cpc_base must be positive");
  require(zero_dropout >= 0.0 && zero_dropout <= 1.0, "zero_dropout must be in [0, 1]");
  require(noise_std >= 0.0 && ctr_std >= 0.0 && cpc_std >= 0.0 && category_std >= 0.0 && traffic_base_spread >= 0.0,
          "standard deviations must be non-negative");
  const bool known = distractor.empty() || std::find(data::kCovariateNames.begin(), data::kCovariateNames.end(),
                                                     distractor) != data::kCovariateNames.end();
  require(known, "unknown distractor column '" + distractor + "'");
  data::parse_date(start_date);
}

SyntheticPanel generate(const GeneratorSpec& spec) {
  spec.validate();
  const data::Date start = data::parse_date(spec.start_date);
  const std::size_t n = spec.days;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<std::vector<double>> factor(spec.categories, std::vector<double>(n));
  for (std::size_t c = 0; c < spec.categories; ++c) {
    auto rng = stream(spec.seed, 1, c);
    const double stationary = spec.category_std / std::sqrt(1.0 - spec.category_phi * spec.category_phi);
    factor[c][0] = stationary * normal(rng);
    for (std::size_t t = 1; t < n; ++t)
      factor[c][t] = spec.category_phi * factor[c][t - 1] + spec.category_std * normal(rng);
  }

  std::vector<double> seasonal(n);
  std::vector<int> weekday(n);
  for (std::size_t t = 0; t < n; ++t) {
    const data::Date d = start + std::chrono::days(static_cast<long>(t));
    weekday[t] = data::day_of_week(d);
    seasonal[t] = spec.weekly_amplitude * kWeeklyShape[static_cast<std::size_t>(weekday[t])] +
                  spec.annual_amplitude * std::sin(2.0 * std::numbers::pi * (data::day_of_year(d) - 1) / 365.25);
  }

  const auto distractor = std::find(data::kCovariateNames.begin(), data::kCovariateNames.end(), spec.distractor);
  SyntheticPanel out;
  for (std::size_t i = 0; i < spec.publishers; ++i) {
    auto base_rng = stream(spec.seed, 0, i);
    const double base = spec.traffic_base + spec.traffic_base_spread * (2.0 * uniform(base_rng) - 1.0);
    const double cpc_level = spec.cpc_base * std::exp(0.25 * normal(base_rng));
    const std::size_t category = i % spec.categories;

    data::PublisherSeries s;
    char id[16];
    std::snprintf(id, sizeof id, "pub%02zu", i);
    s.id = id;
    s.country = kCountries[i % kCountries.size()];
    s.category = "cat" + std::to_string(category);
    s.start = start;
    s.revenue.resize(n);
    for (auto& col : s.covariates) col.resize(n);
    std::vector<double> ctr(n), cpc(n);

    auto noise_rng = stream(spec.seed, 2, i);
    auto ctr_rng = stream(spec.seed, 3, i);
    auto cpc_rng = stream(spec.seed, 4, i);
    auto traffic_rng = stream(spec.seed, 5, i);
    auto dropout_rng = stream(spec.seed, 6, i);
    auto distractor_rng = stream(spec.seed, 7, i);

    double eps = spec.noise_std / std::sqrt(1.0 - spec.ar_phi * spec.ar_phi) * normal(noise_rng);
    double ctr_state = 0.0;
    double cpc_state = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) eps = spec.ar_phi * eps + spec.noise_std * normal(noise_rng);
      ctr_state = spec.slow_phi * ctr_state + spec.ctr_std * normal(ctr_rng);
      cpc_state = spec.slow_phi * cpc_state + spec.cpc_std * normal(cpc_rng);
      ctr[t] = logistic(logit(spec.ctr_base) + ctr_state);
      cpc[t] = cpc_level * std::exp(cpc_state);

      double impressions =
          std::round(std::exp(base + seasonal[t] + spec.category_strength * factor[category][t] + eps));
      double clicks = std::min(impressions, std::round(impressions * ctr[t]));
      const double z_sessions = normal(traffic_rng);
      const double z_pages = normal(traffic_rng);
      const double z_bounce = normal(traffic_rng);
      const double sessions = std::round(impressions / 2.5 * std::exp(0.05 * z_sessions));
      const double pages = std::round(sessions * 2.2 * std::exp(0.05 * z_pages));
      const double bounces = std::round(sessions * logistic(logit(0.4) + 0.1 * z_bounce));
      if (uniform(dropout_rng) < spec.zero_dropout) {
        impressions = 0.0;
        clicks = 0.0;
      }
      s.covariates[data::kImpressions][t] = impressions;
      s.covariates[data::kClicks][t] = clicks;
      s.covariates[data::kPageViews][t] = pages;
      s.covariates[data::kSessions][t] = sessions;
      s.covariates[data::kBounces][t] = bounces;
      s.revenue[t] = clicks * cpc[t];

      const double noise = std::round(std::exp(spec.traffic_base + 0.5 * normal(distractor_rng)));
      if (distractor != data::kCovariateNames.end())
        s.covariates[static_cast<std::size_t>(distractor - data::kCovariateNames.begin())][t] = noise;
    }
    out.panel.publishers.push_back(std::move(s));
    out.ctr.push_back(std::move(ctr));
    out.cpc.push_back(std::move(cpc));
  }
  return out;
}

data::SeriesPanel generate_panel(const GeneratorSpec& spec) { return generate(spec).panel; }

std::vector<double> seasonal_naive_forecast(std::span<const double> history, std::size_t tau, std::size_t period) {
  if (period == 0 || history.size() < period) {
    throw ContractError("seasonal naive forecast needs at least " + std::to_string(period) + " observations, got " +
                        std::to_string(history.size()));
  }
  std::vector<double> out(tau);
  const std::size_t n = history.size();
  for (std::size_t t = 0; t < tau; ++t) out[t] = history[n - period + (t % period)];
  return out;
}

double autocorrelation(std::span<const double> series, std::size_t lag) {
  const std::size_t n = series.size();
  if (lag >= n) throw ContractError("lag exceeds series length");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    den += (series[t] - mean) * (series[t] - mean);
    if (t + lag < n) num += (series[t] - mean) * (series[t + lag] - mean);
  }
  if (den == 0.0) throw NumericError("autocorrelation of a constant series is undefined");
  return num / den;
}

}  // namespace adrev::synth
