#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "resmap/tensor/tensor.hpp"

namespace resmap::tensor {

template <typename T>
class Tape;

/// Handle to a node recorded on a Tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const { return tape->value(*this); }
  const Shape& shape() const { return value().shape(); }
};

/// Define-by-run record of primitive operations for reverse-mode
/// differentiation. Nodes are appended in execution order, so the record is
/// topologically sorted by construction. A tape supports exactly one
/// backward pass; build a fresh tape for every forward pass.
///
/// Not thread-safe: a tape and its nodes belong to one thread.
template <typename T>
class Tape {
 public:
  /// Propagates the node's output gradient into its inputs via grad_sink().
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Input that never receives a gradient.
  Var<T> constant(Tensor<T> value);
  /// Differentiable leaf (model parameter or checked input).
  Var<T> leaf(Tensor<T> value);

  /// Appends an operation result. `backward` may be empty when no input
  /// requires a gradient.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);

  const Tensor<T>& value(Var<T> v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var<T> v) const { return nodes_.at(v.id).requires_grad; }

  /// Runs the reverse sweep from a single-element loss. Throws
  /// std::logic_error on a second call, ShapeError on a non-scalar loss.
  void backward(Var<T> loss);

  /// Gradient of the loss w.r.t. v; zeros if v did not influence the loss.
  const Tensor<T>& grad(Var<T> v);

  /// Zero-initialized accumulation buffer for v, or nullptr when v does not
  /// require a gradient. Only valid during backward().
  Tensor<T>* grad_sink(Var<T> v);

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  /// Opt-in record of the discrete choices made by piecewise ops (leaky
  /// sign, pool argmax, clamp saturation). Two forward passes with equal
  /// signatures evaluated the same linear piece of the graph.
  void track_branches(bool on) { track_branches_ = on; }
  bool tracking_branches() const { return track_branches_; }
  void note_branch(std::uint64_t choice) {
    std::uint64_t z = branch_signature_ ^ (choice + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    branch_signature_ = z ^ (z >> 31);
  }
  std::uint64_t branch_signature() const { return branch_signature_; }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;  // stable references across appends
  bool consumed_ = false;
  bool track_branches_ = false;
  std::uint64_t branch_signature_ = 0;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace resmap::tensor
