#pragma once

#include <functional>

#include "adrev/tensor.hpp"

namespace adrev {

/// Central-difference gradient of a scalar function at x. The function is
/// evaluated with gradient recording off; x's values are restored on exit.
Tensor finite_diff_grad(const std::function<Tensor(const Tensor&)>& f, Tensor x, double h = 1e-5);

/// Largest |a-b| / max(|a|, |b|, floor) over paired entries.
double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-3);

}  // namespace adrev
