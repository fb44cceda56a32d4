#include "sceneptp/parameters.hpp"

#include <cmath>
#include <numbers>

#include "sceneptp/errors.hpp"

namespace sceneptp {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next() % i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

template <Real T>
const Tensor<T>& ParameterSet<T>::add(const std::string& name, Tensor<T> value) {
  if (contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  value.set_requires_grad(true);
  index_.emplace(name, items_.size());
  items_.emplace_back(name, std::move(value));
  return items_.back().second;
}

template <Real T>
const Tensor<T>& ParameterSet<T>::he_uniform(const std::string& name, const Shape& shape, std::size_t fan_in) {
  if (fan_in == 0) throw ContractError("he_uniform: zero fan-in for '" + name + "'");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<T> values(shape_numel(shape));
  for (auto& v : values) v = static_cast<T>(rng_.uniform(-bound, bound));
  return add(name, Tensor<T>::from(shape, std::move(values)));
}

template <Real T>
const Tensor<T>& ParameterSet<T>::zeros(const std::string& name, const Shape& shape) {
  return add(name, Tensor<T>::zeros(shape));
}

template <Real T>
const Tensor<T>& ParameterSet<T>::constant(const std::string& name, const Shape& shape, T value) {
  return add(name, Tensor<T>::full(shape, value));
}

template <Real T>
const Tensor<T>& ParameterSet<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + name + "'");
  return items_[it->second].second;
}

template <Real T>
std::size_t ParameterSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : items_) n += t.numel();
  return n;
}

template <Real T>
void ParameterSet<T>::zero_grad() {
  for (auto& [name, t] : items_) t.zero_grad();
}

template <Real T>
double ParameterSet<T>::grad_norm() const {
  double acc = 0.0;
  for (const auto& [name, t] : items_)
    for (T g : t.grad()) acc += static_cast<double>(g) * static_cast<double>(g);
  return std::sqrt(acc);
}

template <Real T>
void sgd_step(ParameterSet<T>& params, double lr) {
  if (!(lr >= 0.0)) throw ContractError("sgd_step: learning rate must be nonnegative");
  for (const auto& [name, t] : params.items())
    if (!t.has_grad()) throw ContractError("sgd_step: parameter '" + name + "' has no gradient");
  const T step = static_cast<T>(lr);
  for (auto [name, t] : params.items()) {  // handles share storage
    auto value = t.mutable_data();
    const auto grad = t.grad();
    for (std::size_t i = 0; i < value.size(); ++i) value[i] -= step * grad[i];
  }
  params.zero_grad();
}

template <Real T>
double clip_grad_norm(ParameterSet<T>& params, double max_norm) {
  const double norm = params.grad_norm();
  if (norm > max_norm && norm > 0.0) {
    const T factor = static_cast<T>(max_norm / norm);
    for (auto [name, t] : params.items())
      if (t.has_grad())
        for (auto& g : t.mutable_grad()) g *= factor;
  }
  return norm;
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template void sgd_step(ParameterSet<float>&, double);
template void sgd_step(ParameterSet<double>&, double);
template double clip_grad_norm(ParameterSet<float>&, double);
template double clip_grad_norm(ParameterSet<double>&, double);

}  // namespace sceneptp
