#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <vector>

#include "adrev/gradcheck.hpp"
#include "adrev/ops.hpp"
#include "adrev/parameters.hpp"
#include "adrev/tensor.hpp"

namespace adrev::testing {

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0, bool grad = false) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = dist(rng);
  return Tensor::from(std::move(shape), std::move(v), grad);
}

inline void randomize(ParameterSet& ps, Rng& rng, double spread = 0.5) {
  std::uniform_real_distribution<double> dist(-spread, spread);
  for (auto& e : ps.entries())
    for (auto& v : e.tensor.data()) v = dist(rng);
}

/// Worst relative error between backward() and central differences over
/// every tensor in `inputs`.
inline double gradient_error(const std::function<Tensor()>& loss, std::vector<Tensor> inputs) {
  for (auto& t : inputs) t.zero_grad();
  backward(loss());
  double worst = 0.0;
  for (auto& t : inputs) {
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    Tensor numeric = finite_diff_grad([&](const Tensor&) { return loss(); }, t);
    worst = std::max(worst, max_relative_error(analytic, numeric.data()));
  }
  return worst;
}

inline double gradient_error(const std::function<Tensor()>& loss, ParameterSet& ps) {
  std::vector<Tensor> ts;
  for (auto& e : ps.entries()) ts.push_back(e.tensor);
  return gradient_error(loss, ts);
}

/// Weighted sum with fixed random coefficients, so every output entry
/// contributes a distinct gradient.
inline Tensor probe(const Tensor& y, std::uint64_t seed = 99) {
  Rng rng(seed);
  Tensor w = random_tensor(y.shape(), rng);
  return sum(mul(y, w));
}

}  // namespace adrev::testing
