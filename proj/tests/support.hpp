#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sceneptp/ops.hpp"
#include "sceneptp/tape.hpp"

namespace testing {

using sceneptp::Shape;
using sceneptp::Tensor;
using TD = Tensor<double>;

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

// Values bounded away from zero, for inputs that pass through kinks.
inline std::vector<double> away_from_zero(std::size_t n, std::mt19937_64& gen, double min_abs = 0.1) {
  std::uniform_real_distribution<double> d(min_abs, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = sign(gen) ? d(gen) : -d(gen);
  return v;
}

inline TD random_tensor(const Shape& shape, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
  return TD::from(shape, random_values(sceneptp::shape_numel(shape), gen, lo, hi));
}

inline TD leaf(TD t) {
  t.set_requires_grad(true);
  return t;
}

// Reduces any output to a scalar with fixed random weights so the check
// exercises the whole Jacobian, not just its column sums.
inline TD project(const TD& out, std::uint64_t seed = 99) {
  std::mt19937_64 gen(seed);
  return sceneptp::sum(sceneptp::mul(out, random_tensor(out.shape(), gen)));
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// Central differences against reverse mode for every element of every input.
// Error per element: |analytic - numeric| / max(|analytic|, |numeric|, 1e-3).
inline GradCheck grad_check(std::vector<TD> inputs, const std::function<TD(const std::vector<TD>&)>& f,
                            double eps = 1e-6) {
  for (auto& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  TD loss = f(inputs);
  sceneptp::backward(loss);
  GradCheck r;
  for (auto& t : inputs) {
    std::vector<double> analytic(t.numel(), 0.0);
    if (t.has_grad()) analytic.assign(t.grad().begin(), t.grad().end());
    auto data = t.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double orig = data[i];
      double lp, lm;
      {
        sceneptp::NoGradGuard guard;
        data[i] = orig + eps;
        lp = f(inputs).item();
        data[i] = orig - eps;
        lm = f(inputs).item();
      }
      data[i] = orig;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-3});
      r.max_rel_error = std::max(r.max_rel_error, std::fabs(analytic[i] - numeric) / denom);
      ++r.checked;
    }
  }
  return r;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  std::random_device rd;
  const auto p = std::filesystem::temp_directory_path() /
                 ("sceneptp_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) : path(temp_dir(tag)) {}
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testing
