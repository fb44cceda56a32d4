#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sceneptp/tensor.hpp"

namespace sceneptp {

/// The recorded operations reachable from a scalar loss, in execution order.
/// Backward visits them in exactly the reverse order; gradients of tensors
/// with several consumers accumulate additively.
template <Real T>
class Tape {
 public:
  struct Entry {
    std::uint64_t seq;
    std::string op;
  };

  static Tape of(const Tensor<T>& loss);

  const std::vector<Entry>& entries() const { return entries_; }
  // Op sequence numbers in the order the last backward() visited them.
  const std::vector<std::uint64_t>& visit_order() const { return visited_; }
  void backward();

 private:
  explicit Tape(Tensor<T> loss) : loss_(std::move(loss)) {}

  Tensor<T> loss_;
  std::vector<detail::Node<T>*> nodes_;
  std::vector<Entry> entries_;
  std::vector<std::uint64_t> visited_;
};

extern template class Tape<float>;
extern template class Tape<double>;

/// Populates the gradient of every requires_grad tensor reachable from `loss`.
template <Real T>
void backward(const Tensor<T>& loss) {
  Tape<T>::of(loss).backward();
}

}  // namespace sceneptp
