#include "resmap/tensor/adam.hpp"

#include <cmath>
#include <string>

namespace resmap::tensor {

template <typename T>
OptimizerState<T>::OptimizerState(std::span<Tensor<T>* const> params, AdamOptions opts)
    : options(opts) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const Tensor<T>* p : params) {
    first_moment.emplace_back(p->shape());
    second_moment.emplace_back(p->shape());
  }
}

template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads,
               OptimizerState<T>& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients and " +
                     std::to_string(state.first_moment.size()) + " accumulators");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape() != params[i]->shape() ||
        state.first_moment[i].shape() != params[i]->shape() ||
        state.second_moment[i].shape() != params[i]->shape()) {
      throw ShapeError("adam_step: parameter " + std::to_string(i) + " has shape " +
                       to_string(params[i]->shape()) + ", gradient " +
                       to_string(grads[i].shape()));
    }
  }

  ++state.step;
  const AdamOptions& o = state.options;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  const T b1 = static_cast<T>(o.beta1);
  const T b2 = static_cast<T>(o.beta2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    Tensor<T>& m = state.first_moment[i];
    Tensor<T>& v = state.second_moment[i];
    const Tensor<T>& g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (T{1} - b1) * g[j];
      v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= static_cast<T>(o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon));
    }
  }
}

template struct OptimizerState<float>;
template struct OptimizerState<double>;
template void adam_step(std::span<Tensor<float>* const>, std::span<const Tensor<float>>,
                        OptimizerState<float>&);
template void adam_step(std::span<Tensor<double>* const>, std::span<const Tensor<double>>,
                        OptimizerState<double>&);

}  // namespace resmap::tensor
