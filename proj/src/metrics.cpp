#include "sceneptp/metrics.hpp"

#include <cmath>

#include "sceneptp/errors.hpp"

namespace sceneptp {

namespace {
template <Real T>
void check_pair(const Tensor<T>& pred, const Tensor<T>& truth, const char* who) {
  if (pred.shape() != truth.shape() || pred.rank() != 3 || pred.dim(2) != 2)
    throw DimensionError(std::string(who) + ": prediction " + shape_str(pred.shape()) + " vs truth " +
                         shape_str(truth.shape()) + ", expected matching [N, T, 2]");
}
}  // namespace

template <Real T>
Tensor<T> ade(const Tensor<T>& pred, const Tensor<T>& truth) {
  check_pair(pred, truth, "ade");
  return mean_all(l2norm(sub(pred, truth), -1));
}

template <Real T>
Tensor<T> fde(const Tensor<T>& pred, const Tensor<T>& truth) {
  check_pair(pred, truth, "fde");
  const std::size_t last = pred.dim(1) - 1;
  return mean_all(l2norm(sub(select(pred, 1, last), select(truth, 1, last)), -1));
}

template <Real T>
Tensor<T> composite_loss(const Tensor<T>& pred, const Tensor<T>& truth) {
  return add(ade(pred, truth), fde(pred, truth));
}

template <Real T>
DisplacementSums displacement_sums(const Tensor<T>& pred, const Tensor<T>& truth) {
  check_pair(pred, truth, "displacement_sums");
  DisplacementSums s;
  s.peds = pred.dim(0);
  s.steps = pred.dim(1);
  const auto p = pred.data(), t = truth.data();
  for (std::size_t i = 0; i < s.peds; ++i)
    for (std::size_t k = 0; k < s.steps; ++k) {
      const std::size_t at = (i * s.steps + k) * 2;
      const double dx = static_cast<double>(p[at]) - static_cast<double>(t[at]);
      const double dy = static_cast<double>(p[at + 1]) - static_cast<double>(t[at + 1]);
      const double d = std::sqrt(dx * dx + dy * dy);
      s.all_steps += d;
      if (k + 1 == s.steps) s.final_step += d;
    }
  return s;
}

#define INSTANTIATE(T)                                                      \
  template Tensor<T> ade(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> fde(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> composite_loss(const Tensor<T>&, const Tensor<T>&);    \
  template DisplacementSums displacement_sums(const Tensor<T>&, const Tensor<T>&);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
