#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adrev/parameters.hpp"

namespace adrev {

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
};

/// One bias-corrected Adam update of `params` in place. Moments are sized
/// lazily on the first call.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Adam over every tensor of a parameter set, one state per tensor.
class Adam {
 public:
  explicit Adam(ParameterSet& params, double learning_rate = 1e-3);

  void step();
  double learning_rate() const { return learning_rate_; }
  const std::vector<AdamState>& states() const { return states_; }

 private:
  ParameterSet* params_;
  double learning_rate_;
  std::vector<AdamState> states_;
};

}  // namespace adrev
