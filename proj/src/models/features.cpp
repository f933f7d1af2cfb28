#include "features.hpp"

#include <cmath>

#include "adrev/error.hpp"
#include "adrev/ops.hpp"

namespace adrev::models::detail {

std::size_t one_hot_width(const std::vector<data::FeatureSpec>& columns) {
  std::size_t w = 0;
  for (const auto& c : columns) w += c.cardinality ? static_cast<std::size_t>(c.cardinality) : 1;
  return w;
}

Tensor one_hot(const Tensor& x, const std::vector<data::FeatureSpec>& columns) {
  const std::size_t n = x.dim(0);
  const std::size_t in = columns.size();
  if (x.dim(1) != in) throw ShapeError("one_hot: " + shape_str(x.shape()) + " vs " + std::to_string(in) + " columns");
  const std::size_t width = one_hot_width(columns);
  std::vector<double> out(n * width, 0.0);
  const auto xv = x.data();
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < in; ++c) {
      const double v = xv[r * in + c];
      const int card = columns[c].cardinality;
      if (card == 0) {
        out[r * width + offset] = v;
        offset += 1;
      } else {
        const int code = static_cast<int>(v);
        if (code != v || code < 0 || code >= card) {
          throw DataError("categorical '" + columns[c].name + "' value " + std::to_string(v) + " outside [0, " +
                          std::to_string(card) + ")");
        }
        out[r * width + offset + static_cast<std::size_t>(code)] = 1.0;
        offset += static_cast<std::size_t>(card);
      }
    }
  }
  return Tensor::from({n, width}, std::move(out));
}

Tensor target_history(const data::Batch& batch) {
  const std::size_t b = batch.size, k = batch.lookback;
  const std::size_t width = batch.encoder.dim(1);
  const auto ev = batch.encoder.data();
  std::vector<double> out(b * k);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t j = 0; j < b; ++j) out[j * k + t] = ev[(t * b + j) * width];
  return Tensor::from({b, k}, std::move(out));
}

Tensor batch_major(const Tensor& x, std::size_t steps, std::size_t batch) {
  return transpose01(reshape(x, {steps, batch, x.dim(1)}));
}

Tensor embed_statics(const std::vector<Tensor>& tables, const Tensor& statics) {
  const std::size_t b = statics.dim(0);
  std::vector<Tensor> parts;
  for (std::size_t c = 0; c < tables.size(); ++c) {
    std::vector<int> codes(b);
    for (std::size_t j = 0; j < b; ++j) codes[j] = static_cast<int>(statics.data()[j * statics.dim(1) + c]);
    parts.push_back(embedding(tables[c], codes));
  }
  return parts.size() == 1 ? parts.front() : concat(parts, 1);
}

}  // namespace adrev::models::detail
