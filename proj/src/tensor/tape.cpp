#include "resmap/tensor/tape.hpp"

#include <sstream>
#include <stdexcept>

namespace resmap::tensor {

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

template <typename T>
Var<T> Tape<T>::constant(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), {}, false, {}});
  return Var<T>{this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), {}, true, {}});
  return Var<T>{this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                       BackwardFn backward) {
  bool needs = false;
  for (const auto& in : inputs) {
    if (in.tape != this) throw std::logic_error("operation mixes nodes from different tapes");
    needs = needs || nodes_.at(in.id).requires_grad;
  }
  Node node{std::move(value), {}, false, {}};
  if (needs && backward) {
    node.requires_grad = true;
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var<T>{this, nodes_.size() - 1};
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
  if (consumed_) throw std::logic_error("stale tape: backward already ran; rebuild the graph");
  if (loss.tape != this) throw std::logic_error("loss belongs to a different tape");
  Node& root = nodes_.at(loss.id);
  if (root.value.size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " + to_string(root.value.shape()));
  }
  consumed_ = true;
  if (!root.requires_grad) return;
  root.grad = Tensor<T>(root.value.shape(), T{1});
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(*this, node.grad);
  }
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var<T> v) {
  Node& node = nodes_.at(v.id);
  if (node.grad.shape() != node.value.shape()) node.grad = Tensor<T>(node.value.shape());
  return node.grad;
}

template <typename T>
Tensor<T>* Tape<T>::grad_sink(Var<T> v) {
  Node& node = nodes_.at(v.id);
  if (!node.requires_grad) return nullptr;
  if (node.grad.shape() != node.value.shape()) node.grad = Tensor<T>(node.value.shape());
  return &node.grad;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace resmap::tensor
