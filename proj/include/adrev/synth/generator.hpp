#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adrev/data/panel.hpp"

namespace adrev::synth {

struct GeneratorSpec {
  std::size_t publishers = 10;
  std::size_t categories = 3;
  std::size_t days = 730;
  std::string start_date = "2018-01-01";

  double traffic_base = 9.0;          // log impressions around which publishers are drawn
  double traffic_base_spread = 0.8;   // half-width of the uniform draw; 0 gives identical bases
  double weekly_amplitude = 0.3;
  double annual_amplitude = 0.2;
  double category_strength = 0.8;     // rho
  double category_phi = 0.9;          // persistence of the shared category factor
  double category_std = 0.1;          // innovation std of the category factor
  double ar_phi = 0.5;
  double noise_std = 0.15;

  double ctr_base = 0.02;
  double ctr_std = 0.02;              // innovation std of the logit random walk
  double cpc_base = 0.5;
  double cpc_std = 0.02;              // innovation std of the log random walk
  double slow_phi = 0.98;             // mean reversion of both CTR and CPC processes

  double zero_dropout = 0.0;
  /// Covariate replaced by i.i.d. log-normal noise; empty keeps every column informative.
  std::string distractor = "page_views";
  std::uint64_t seed = 42;

  /// Throws ConfigError on out-of-range fields.
  void validate(std::size_t lookback = 89, std::size_t horizon = 7) const;
};

/// Generated panel together with the latent CTR and CPC paths.
struct SyntheticPanel {
  data::SeriesPanel panel;
  std::vector<std::vector<double>> ctr;
  std::vector<std::vector<double>> cpc;
};

SyntheticPanel generate(const GeneratorSpec& spec);
data::SeriesPanel generate_panel(const GeneratorSpec& spec);

/// forecast[t] = history[n - period + (t mod period)]
std::vector<double> seasonal_naive_forecast(std::span<const double> history, std::size_t tau,
                                            std::size_t period = 7);

/// Sample autocorrelation with the full-series mean and variance.
double autocorrelation(std::span<const double> series, std::size_t lag);

}  // namespace adrev::synth
