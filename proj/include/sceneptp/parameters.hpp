#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sceneptp/tensor.hpp"

namespace sceneptp {

/// Seeded generator shared by everything that draws random numbers. Uniform
/// variates are built from raw 64-bit draws so streams are identical on every
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller.
  double normal();
  std::uint64_t next() { return engine_(); }
  // Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Named trainable tensors in deterministic insertion order.
template <Real T>
class ParameterSet {
 public:
  explicit ParameterSet(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  const Tensor<T>& add(const std::string& name, Tensor<T> value);
  // Fan-in scaled uniform in [-sqrt(6/fan_in), sqrt(6/fan_in)].
  const Tensor<T>& he_uniform(const std::string& name, const Shape& shape, std::size_t fan_in);
  const Tensor<T>& zeros(const std::string& name, const Shape& shape);
  const Tensor<T>& constant(const std::string& name, const Shape& shape, T value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Tensor<T>& get(const std::string& name) const;
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;
  const std::vector<std::pair<std::string, Tensor<T>>>& items() const { return items_; }

  void zero_grad();
  // Global L2 norm of all gradients (missing gradients count as zero).
  double grad_norm() const;

  std::uint64_t seed() const { return seed_; }
  Rng& rng() { return rng_; }

 private:
  std::uint64_t seed_;
  Rng rng_;
  std::vector<std::pair<std::string, Tensor<T>>> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;

/// p <- p - lr * grad(p) for every parameter, then clears the gradients.
template <Real T>
void sgd_step(ParameterSet<T>& params, double lr);

/// Rescales gradients so their global norm is at most max_norm. Returns the
/// norm before clipping.
template <Real T>
double clip_grad_norm(ParameterSet<T>& params, double max_norm);

}  // namespace sceneptp
