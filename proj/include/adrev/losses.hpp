#pragma once

#include <span>

#include "adrev/tensor.hpp"

namespace adrev {

/// Pinball loss averaged over every entry of y [N...] against one quantile
/// forecast of the same shape.
Tensor quantile_loss(const Tensor& y, const Tensor& forecast, double q);

/// Mean pinball loss over quantiles; forecasts is [..., Q] with y [...].
Tensor quantile_loss(const Tensor& y, const Tensor& forecasts, std::span<const double> quantiles);

Tensor mse_loss(const Tensor& y, const Tensor& forecast);

/// Mean negative log-likelihood of y under N(mu, sigma^2).
Tensor gaussian_nll(const Tensor& y, const Tensor& mu, const Tensor& sigma);

}  // namespace adrev
