#include "adrev/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "adrev/error.hpp"

namespace adrev {

Tensor ParameterSet::add(const std::string& name, Shape shape) {
  for (const auto& e : entries_) {
    if (e.name == name) throw ContractError("duplicate parameter name " + name);
  }
  Tensor t = Tensor::zeros(std::move(shape), true);
  entries_.push_back({name, t});
  return t;
}

Tensor ParameterSet::add_glorot(const std::string& name, Shape shape, Rng& rng) {
  Tensor t = add(name, shape);
  const double fan_in = static_cast<double>(shape.size() > 1 ? shape[shape.size() - 2] : 1);
  const double fan_out = static_cast<double>(shape.back());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

Tensor ParameterSet::find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.tensor;
  }
  throw LookupError("no parameter named " + name);
}

void ParameterSet::zero_grad() {
  for (auto& e : entries_) e.tensor.zero_grad();
}

double ParameterSet::clip_grad_norm(double max_norm) {
  double total = 0.0;
  for (auto& e : entries_) {
    for (double g : e.tensor.grad()) total += g * g;
  }
  const double norm = std::sqrt(total);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& e : entries_) {
      for (double& g : e.tensor.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

std::vector<std::vector<double>> ParameterSet::snapshot() const {
  std::vector<std::vector<double>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.tensor.to_vector());
  return out;
}

void ParameterSet::restore(const std::vector<std::vector<double>>& values) {
  if (values.size() != entries_.size()) throw ShapeError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto dst = entries_[i].tensor.data();
    if (dst.size() != values[i].size()) throw ShapeError("restore: size mismatch for " + entries_[i].name);
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

void ParameterSet::fill(double value) {
  for (auto& e : entries_) std::fill(e.tensor.data().begin(), e.tensor.data().end(), value);
}

}  // namespace adrev
