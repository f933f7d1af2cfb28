#pragma once

#include <vector>

#include "adrev/data/windows.hpp"
#include "adrev/tensor.hpp"

namespace adrev::models::detail {

/// Expands categorical columns into one-hot indicators; real columns pass
/// through. Operates on data tensors only.
Tensor one_hot(const Tensor& x, const std::vector<data::FeatureSpec>& columns);
std::size_t one_hot_width(const std::vector<data::FeatureSpec>& columns);

/// Encoder column 0 gathered into a batch-major history [B, k].
Tensor target_history(const data::Batch& batch);

/// [T*B, d] time-major to [B, T, d].
Tensor batch_major(const Tensor& x, std::size_t steps, std::size_t batch);

/// Concatenated static embeddings [B, tables * width].
Tensor embed_statics(const std::vector<Tensor>& tables, const Tensor& statics);

}  // namespace adrev::models::detail
