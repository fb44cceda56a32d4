#include "sceneptp/tensor.hpp"

#include <atomic>
#include <sstream>

#include "sceneptp/errors.hpp"

namespace sceneptp {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

namespace detail {
std::uint64_t next_sequence() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}
}  // namespace detail

namespace {
thread_local bool grad_mode_enabled = true;

void check_shape(const Shape& shape) {
  for (auto e : shape)
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
}
}  // namespace

bool GradMode::enabled() { return grad_mode_enabled; }
void GradMode::set_enabled(bool on) { grad_mode_enabled = on; }

template <Real T>
Tensor<T> Tensor<T>::zeros(const Shape& shape) {
  return full(shape, T(0));
}

template <Real T>
Tensor<T> Tensor<T>::full(const Shape& shape, T value) {
  check_shape(shape);
  return from(shape, std::vector<T>(shape_numel(shape), value));
}

template <Real T>
Tensor<T> Tensor<T>::from(const Shape& shape, std::vector<T> values) {
  check_shape(shape);
  if (shape_numel(shape) != values.size())
    throw DimensionError("shape " + shape_str(shape) + " needs " + std::to_string(shape_numel(shape)) +
                         " values, got " + std::to_string(values.size()));
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = shape;
  node->data = std::move(values);
  node->seq = detail::next_sequence();
  return Tensor(std::move(node));
}

template <Real T>
Tensor<T> Tensor<T>::scalar(T value) {
  return from({}, {value});
}

template <Real T>
std::size_t Tensor<T>::dim(int axis) const {
  const int r = static_cast<int>(rank());
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r)
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape()));
  return node_->shape[a];
}

template <Real T>
T Tensor<T>::item() const {
  if (numel() != 1) throw ContractError("item() on tensor of shape " + shape_str(shape()));
  return node_->data[0];
}

template <Real T>
T Tensor<T>::at(std::initializer_list<std::size_t> index) const {
  if (index.size() != rank())
    throw DimensionError("index rank " + std::to_string(index.size()) + " for shape " + shape_str(shape()));
  std::size_t flat = 0, axis = 0;
  for (auto i : index) {
    if (i >= node_->shape[axis]) throw DimensionError("index out of range for shape " + shape_str(shape()));
    flat = flat * node_->shape[axis] + i;
    ++axis;
  }
  return node_->data[flat];
}

template <Real T>
Tensor<T>& Tensor<T>::set_requires_grad(bool on) {
  node_->requires_grad = on;
  return *this;
}

template <Real T>
std::span<T> Tensor<T>::mutable_grad() {
  node_->ensure_grad();
  return node_->grad;
}

template <Real T>
void Tensor<T>::zero_grad() {
  node_->grad.clear();
}

template <Real T>
std::span<T> Tensor<T>::mutable_data() {
  if (!node_->is_leaf()) throw ContractError("in-place write to non-leaf tensor produced by " + node_->op);
  return node_->data;
}

template <Real T>
Tensor<T> Tensor<T>::detach() const {
  return from(shape(), node_->data);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace sceneptp
