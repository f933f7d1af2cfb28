#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adrev/tensor.hpp"

namespace adrev {

using Rng = std::mt19937_64;

/// Named trainable tensors of one model, in registration order.
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
  };

  /// Registers a zero-initialised parameter. Names must be unique.
  Tensor add(const std::string& name, Shape shape);
  /// Registers a parameter with Glorot-uniform values drawn from rng.
  Tensor add_glorot(const std::string& name, Shape shape, Rng& rng);

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  Tensor find(const std::string& name) const;

  void zero_grad();
  /// Rescales gradients so their global L2 norm is at most max_norm.
  /// Returns the norm before clipping.
  double clip_grad_norm(double max_norm);

  std::vector<std::vector<double>> snapshot() const;
  void restore(const std::vector<std::vector<double>>& values);
  void fill(double value);

 private:
  std::vector<Entry> entries_;
};

}  // namespace adrev
