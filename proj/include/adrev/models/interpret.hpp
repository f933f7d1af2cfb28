#pragma once

#include <string>
#include <vector>

#include "adrev/data/windows.hpp"
#include "adrev/models/model.hpp"

namespace adrev::models {

struct VariableImportance {
  std::vector<std::string> encoder_names;
  std::vector<double> encoder;
  std::vector<std::string> decoder_names;
  std::vector<double> decoder;
  std::vector<std::string> static_names;
  std::vector<double> statics;
};

/// profile[lag] is the attention mass a decode row places `lag` positions
/// back, averaged over every decode row of every window.
struct Interpretation {
  VariableImportance importance;
  std::vector<double> attention_profile;
};

/// Single pass over `windows` collecting both summaries. Throws
/// CapabilityError for models other than the TFT.
Interpretation interpret(const ForecastModel& model, const data::WindowSet& windows, std::size_t batch_size = 64);

VariableImportance extract_variable_importance(const ForecastModel& model, const data::WindowSet& windows,
                                               std::size_t batch_size = 64);
std::vector<double> extract_attention_profile(const ForecastModel& model, const data::WindowSet& windows,
                                              std::size_t batch_size = 64);

/// Fraction of (window, step) pairs whose quantile outputs are not ascending.
double quantile_crossing_rate(const Tensor& predictions);

}  // namespace adrev::models
