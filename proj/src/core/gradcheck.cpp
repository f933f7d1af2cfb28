#include "adrev/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "adrev/error.hpp"

namespace adrev {

Tensor finite_diff_grad(const std::function<Tensor(const Tensor&)>& f, Tensor x, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_grad: step must be positive");
  NoGradGuard guard;
  auto values = x.data();
  std::vector<double> grad(values.size());
  auto eval = [&]() {
    const double v = f(x).item();
    if (!std::isfinite(v)) throw NumericError("finite_diff_grad: function returned a non-finite value");
    return v;
  };
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = eval();
    values[i] = saved - h;
    const double down = eval();
    values[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return Tensor::from(x.shape(), std::move(grad));
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw ShapeError("max_relative_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({floor, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace adrev
