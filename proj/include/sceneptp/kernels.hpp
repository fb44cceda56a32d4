#pragma once

#include <cstddef>

#include "sceneptp/tensor.hpp"

// Dense compute kernels behind the differentiable ops. `serial` is the
// straightforward reference; `parallel` reorders loops for locality and
// splits independent outputs across OpenMP threads. Both accumulate every
// output element in the same order, so their results are bitwise equal.
namespace sceneptp::kernels {

// C[m,n] = op(A) * op(B); A is [m,k] ([k,m] if trans_a), B is [k,n] ([n,k] if trans_b).
struct GemmShape {
  std::size_t m, n, k;
  bool trans_a = false;
  bool trans_b = false;
};

struct Conv1dShape {
  std::size_t batch, c_in, c_out, length, kernel, dilation;
  bool causal;
  // Input offset of tap j relative to the output position.
  long offset(std::size_t j) const {
    const long d = static_cast<long>(dilation), jj = static_cast<long>(j), k = static_cast<long>(kernel);
    return causal ? -(k - 1 - jj) * d : (jj - (k - 1) / 2) * d;
  }
};

struct Conv2dShape {
  std::size_t batch, c_in, c_out, height, width, kernel, stride, pad;
  std::size_t out_height() const { return (height + 2 * pad - kernel) / stride + 1; }
  std::size_t out_width() const { return (width + 2 * pad - kernel) / stride + 1; }
};

#define SCENEPTP_KERNEL_DECLS                                                                      \
  template <Real T>                                                                                \
  void gemm(const GemmShape& s, const T* a, const T* b, T* c);                                     \
  template <Real T>                                                                                \
  void conv1d_forward(const Conv1dShape& s, const T* x, const T* w, const T* bias, T* y);          \
  template <Real T>                                                                                \
  void conv1d_backward_input(const Conv1dShape& s, const T* gy, const T* w, T* gx);               \
  template <Real T>                                                                                \
  void conv1d_backward_weight(const Conv1dShape& s, const T* gy, const T* x, T* gw);              \
  template <Real T>                                                                                \
  void conv2d_forward(const Conv2dShape& s, const T* x, const T* w, const T* bias, T* y);          \
  template <Real T>                                                                                \
  void conv2d_backward_input(const Conv2dShape& s, const T* gy, const T* w, T* gx);               \
  template <Real T>                                                                                \
  void conv2d_backward_weight(const Conv2dShape& s, const T* gy, const T* x, T* gw);

namespace serial {
SCENEPTP_KERNEL_DECLS
}
namespace parallel {
SCENEPTP_KERNEL_DECLS
int max_threads();
}

#undef SCENEPTP_KERNEL_DECLS

}  // namespace sceneptp::kernels
