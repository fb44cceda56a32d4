#pragma once

#include "sceneptp/ops.hpp"

namespace sceneptp {

/// Mean Euclidean error over all pedestrians and steps; inputs [N, T, 2].
template <Real T>
Tensor<T> ade(const Tensor<T>& pred, const Tensor<T>& truth);

/// Mean Euclidean error at the final step.
template <Real T>
Tensor<T> fde(const Tensor<T>& pred, const Tensor<T>& truth);

/// ADE + FDE, differentiable in pred.
template <Real T>
Tensor<T> composite_loss(const Tensor<T>& pred, const Tensor<T>& truth);

/// Unnormalised error sums of one window, accumulated in double so scene
/// metrics can be pooled over pedestrians.
struct DisplacementSums {
  double all_steps = 0.0;   // sum over pedestrians and steps
  double final_step = 0.0;  // sum over pedestrians at the last step
  std::size_t peds = 0;
  std::size_t steps = 0;
};

template <Real T>
DisplacementSums displacement_sums(const Tensor<T>& pred, const Tensor<T>& truth);

}  // namespace sceneptp
