#include "sceneptp/tape.hpp"

#include <algorithm>
#include <unordered_set>

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
Tape<T> Tape<T>::of(const Tensor<T>& loss) {
  if (!loss.defined()) throw ContractError("backward: undefined loss");
  if (loss.numel() != 1) throw ContractError("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
  Tape tape(loss);
  std::unordered_set<const detail::Node<T>*> seen;
  std::vector<detail::Node<T>*> stack{loss.node().get()};
  while (!stack.empty()) {
    auto* node = stack.back();
    stack.pop_back();
    if (!node || node->is_leaf() || !seen.insert(node).second) continue;
    tape.nodes_.push_back(node);
    for (auto& in : node->inputs) stack.push_back(in.get());
  }
  std::sort(tape.nodes_.begin(), tape.nodes_.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
  for (auto* n : tape.nodes_) tape.entries_.push_back({n->seq, n->op});
  return tape;
}

template <Real T>
void Tape<T>::backward() {
  if (nodes_.empty()) throw ContractError("backward: no recorded operations lead to the loss");
  auto& root = *loss_.node();
  root.grad.assign(1, T(1));
  visited_.clear();
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    auto* node = *it;
    node->ensure_grad();
    node->backward(*node);
    visited_.push_back(node->seq);
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace sceneptp
