#pragma once

#include <random>
#include <string>
#include <vector>

#include "adrev/data/pipeline.hpp"
#include "adrev/models/model.hpp"
#include "adrev/synth/generator.hpp"

namespace adrev::testing {

inline data::FeatureSchema tiny_schema(std::size_t unknown = 2) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < unknown; ++i) names.push_back("u" + std::to_string(i));
  return data::FeatureSchema::build(names, {3, 2, 2});
}

/// Windows with random contents that respect the schema's categorical ranges.
inline std::vector<data::WindowSample> random_windows(const data::FeatureSchema& schema, std::size_t k,
                                                      std::size_t tau, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const data::FeatureSpec& spec) {
    if (spec.cardinality == 0) return spec.name == "day_of_year" ? unit(rng) : normal(rng);
    return static_cast<double>(std::uniform_int_distribution<int>(0, spec.cardinality - 1)(rng));
  };
  const auto past = schema.past_columns();
  std::vector<data::WindowSample> out(n);
  for (auto& w : out) {
    w.lookback = k;
    w.publisher = "p";
    for (std::size_t t = 0; t < k; ++t)
      for (const auto& c : past) w.encoder.push_back(draw(c));
    for (std::size_t t = 0; t < tau; ++t) {
      for (const auto& c : schema.known) w.decoder.push_back(draw(c));
      w.target.push_back(normal(rng));
    }
    for (std::size_t c = 0; c < 3; ++c) w.statics[c] = static_cast<int>(draw(schema.statics[c]));
  }
  return out;
}

inline data::Batch batch_of(const std::vector<data::WindowSample>& windows) {
  std::vector<const data::WindowSample*> ptrs;
  for (const auto& w : windows) ptrs.push_back(&w);
  return data::collate(ptrs);
}

inline models::ModelConfig tiny_config(models::ModelKind kind, const data::FeatureSchema& schema, std::size_t k,
                                       std::size_t tau) {
  models::ModelConfig c;
  c.kind = kind;
  c.hidden = 4;
  c.heads = 2;
  c.dropout = 0.0;
  c.layers = 1;
  c.lookback = k;
  c.horizon = tau;
  c.static_embedding = 2;
  c.nbeats_blocks = 2;
  c.nbeats_width = 8;
  c.nbeats_layers = 2;
  c.schema = schema;
  c.seed = 5;
  return c;
}

/// Windows cut from the default synthetic panel.
inline data::PreparedData synthetic_data(std::size_t k, std::size_t tau, std::size_t days = 240,
                                         std::size_t publishers = 4) {
  synth::GeneratorSpec spec;
  spec.days = days;
  spec.publishers = publishers;
  spec.categories = 2;
  data::PipelineConfig cfg;
  cfg.lookback = k;
  cfg.horizon = tau;
  return data::prepare(synth::generate_panel(spec), cfg);
}

}  // namespace adrev::testing
