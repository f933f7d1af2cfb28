#include "adrev/losses.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "adrev/error.hpp"
#include "adrev/ops.hpp"

namespace adrev {

Tensor quantile_loss(const Tensor& y, const Tensor& forecast, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ContractError("quantile " + std::to_string(q) + " outside (0, 1)");
  const Tensor e = sub(y, forecast);
  return mean(add(scale(e, q - 1.0), relu(e)));
}

Tensor quantile_loss(const Tensor& y, const Tensor& forecasts, std::span<const double> quantiles) {
  const std::size_t nq = quantiles.size();
  if (nq == 0 || forecasts.dim(forecasts.rank() - 1) != nq || forecasts.numel() != y.numel() * nq) {
    throw ShapeError("quantile_loss: forecasts " + shape_str(forecasts.shape()) + " do not match targets " +
                     shape_str(y.shape()) + " with " + std::to_string(nq) + " quantiles");
  }
  const int axis = static_cast<int>(forecasts.rank()) - 1;
  Tensor total;
  for (std::size_t j = 0; j < nq; ++j) {
    Tensor column = reshape(slice(forecasts, axis, j, 1), y.shape());
    Tensor l = quantile_loss(y, column, quantiles[j]);
    total = j == 0 ? l : add(total, l);
  }
  return scale(total, 1.0 / static_cast<double>(nq));
}

Tensor mse_loss(const Tensor& y, const Tensor& forecast) {
  if (y.numel() != forecast.numel()) {
    throw ShapeError("mse_loss: " + shape_str(y.shape()) + " vs " + shape_str(forecast.shape()));
  }
  return mean(square(sub(y, reshape(forecast, y.shape()))));
}

Tensor gaussian_nll(const Tensor& y, const Tensor& mu, const Tensor& sigma) {
  const Tensor z = div(sub(y, mu), sigma);
  const Tensor per = add(log(sigma), scale(square(z), 0.5));
  return add_scalar(mean(per), 0.5 * std::log(2.0 * std::numbers::pi));
}

}  // namespace adrev
