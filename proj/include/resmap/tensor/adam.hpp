#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "resmap/tensor/tensor.hpp"

namespace resmap::tensor {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter moment accumulators for Adam.
template <typename T>
struct OptimizerState {
  AdamOptions options;
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
  std::int64_t step = 0;

  OptimizerState() = default;
  /// Zeroed accumulators shaped like `params`.
  OptimizerState(std::span<Tensor<T>* const> params, AdamOptions opts);
};

/// One bias-corrected Adam update of `params` in place.
/// Throws ShapeError if params, grads and accumulators are not aligned.
template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads,
               OptimizerState<T>& state);

extern template struct OptimizerState<float>;
extern template struct OptimizerState<double>;

}  // namespace resmap::tensor
