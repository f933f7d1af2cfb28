#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adrev/data/preprocess.hpp"
#include "adrev/tensor.hpp"

namespace adrev::data {

struct FeatureSpec {
  std::string name;
  int cardinality = 0;  // 0 for real-valued inputs
};

/// Role assignment of every model input. Encoder rows are laid out as
/// target, unknown reals, then the known inputs.
struct FeatureSchema {
  std::string target = "revenue";
  std::vector<std::string> unknown;
  std::vector<FeatureSpec> known;
  std::vector<FeatureSpec> statics;

  static FeatureSchema build(const std::vector<std::string>& unknown_names, const std::array<int, 3>& static_cards);

  std::vector<FeatureSpec> past_columns() const;
  std::size_t past_width() const { return 1 + unknown.size() + known.size(); }
  std::size_t known_width() const { return known.size(); }
  std::size_t static_width() const { return statics.size(); }
  /// Throws ConfigError if a name is used in more than one role.
  void validate() const;
  /// Canonical text description used to match checkpoints against data.
  std::string fingerprint() const;
};

struct WindowSample {
  std::size_t series = 0;  // index into the normalized panel
  std::string publisher;
  Date anchor{};                 // first forecast day
  std::size_t lookback = 0;
  std::vector<double> encoder;   // lookback x past_width, row-major
  std::vector<double> decoder;   // horizon x known_width
  std::array<int, 3> statics{};
  std::vector<double> target;    // horizon, normalized scale
};

struct WindowSet {
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  std::vector<WindowSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

std::size_t window_count(std::size_t length, std::size_t lookback, std::size_t horizon);

/// Stride-1 windows over every publisher.
WindowSet make_windows(const NormalizedPanel& panel, std::size_t lookback, std::size_t horizon);

struct Splits {
  WindowSet train;
  WindowSet val;
  WindowSet test;
};

/// Assigns windows by their target span; windows crossing a boundary are dropped.
Splits chrono_split(const WindowSet& windows, Date val_start, Date test_start);

/// A minibatch with sequences laid out time-major (row t * B + b).
struct Batch {
  std::size_t size = 0;
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  Tensor encoder;  // [lookback * B, past_width]
  Tensor decoder;  // [horizon * B, known_width]
  Tensor statics;  // [B, 3]
  Tensor target;   // [B, horizon]
  std::vector<const WindowSample*> samples;
};

Batch collate(std::span<const WindowSample* const> samples);
Batch collate(const WindowSet& set, std::size_t begin, std::size_t count);

}  // namespace adrev::data
