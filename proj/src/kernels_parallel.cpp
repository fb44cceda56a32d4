#include <algorithm>
#include <vector>

#include "sceneptp/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sceneptp::kernels::parallel {

namespace {
// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <Real T>
void gemm(const GemmShape& s, const T* a, const T* b, T* c) {
  const long m = static_cast<long>(s.m);
  const bool big = s.m * s.n * s.k >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < m; ++i) {
    T* crow = c + i * s.n;
    if (!s.trans_b) {
      std::fill(crow, crow + s.n, T(0));
      for (std::size_t p = 0; p < s.k; ++p) {
        const T av = s.trans_a ? a[p * s.m + i] : a[i * s.k + p];
        const T* brow = b + p * s.n;
        for (std::size_t j = 0; j < s.n; ++j) crow[j] += av * brow[j];
      }
    } else {
      for (std::size_t j = 0; j < s.n; ++j) {
        const T* brow = b + j * s.k;
        T acc = 0;
        if (!s.trans_a) {
          const T* arow = a + i * s.k;
          for (std::size_t p = 0; p < s.k; ++p) acc += arow[p] * brow[p];
        } else {
          for (std::size_t p = 0; p < s.k; ++p) acc += a[p * s.m + i] * brow[p];
        }
        crow[j] = acc;
      }
    }
  }
}

template <Real T>
void conv1d_forward(const Conv1dShape& s, const T* x, const T* w, const T* bias, T* y) {
  const long rows = static_cast<long>(s.batch * s.c_out);
  const long len = static_cast<long>(s.length);
  const bool big = s.batch * s.c_out * s.c_in * s.kernel * s.length >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long r = 0; r < rows; ++r) {
    const std::size_t n = r / s.c_out, co = r % s.c_out;
    T* out = y + r * s.length;
    std::fill(out, out + s.length, T(0));
    for (std::size_t ci = 0; ci < s.c_in; ++ci) {
      const T* in = x + (n * s.c_in + ci) * s.length;
      const T* wk = w + (co * s.c_in + ci) * s.kernel;
      for (std::size_t j = 0; j < s.kernel; ++j) {
        const long off = s.offset(j);
        const long lo = std::max(0L, -off), hi = std::min(len, len - off);
        const T wv = wk[j];
        for (long t = lo; t < hi; ++t) out[t] += wv * in[t + off];
      }
    }
    if (bias)
      for (long t = 0; t < len; ++t) out[t] = out[t] + bias[co];
  }
}

template <Real T>
void conv1d_backward_input(const Conv1dShape& s, const T* gy, const T* w, T* gx) {
  const long rows = static_cast<long>(s.batch * s.c_in);
  const long len = static_cast<long>(s.length);
  const bool big = s.batch * s.c_out * s.c_in * s.kernel * s.length >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long r = 0; r < rows; ++r) {
    const std::size_t n = r / s.c_in, ci = r % s.c_in;
    T* out = gx + r * s.length;
    std::fill(out, out + s.length, T(0));
    for (std::size_t co = 0; co < s.c_out; ++co) {
      const T* g = gy + (n * s.c_out + co) * s.length;
      const T* wk = w + (co * s.c_in + ci) * s.kernel;
      for (std::size_t j = 0; j < s.kernel; ++j) {
        const long off = s.offset(j);
        const long lo = std::max(0L, -off), hi = std::min(len, len - off);
        const T wv = wk[j];
        for (long t = lo; t < hi; ++t) out[t + off] += wv * g[t];
      }
    }
  }
}

template <Real T>
void conv1d_backward_weight(const Conv1dShape& s, const T* gy, const T* x, T* gw) {
  const long taps = static_cast<long>(s.c_out * s.c_in * s.kernel);
  const long len = static_cast<long>(s.length);
  const bool big = s.batch * s.c_out * s.c_in * s.kernel * s.length >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long idx = 0; idx < taps; ++idx) {
    const std::size_t j = idx % s.kernel, ci = (idx / s.kernel) % s.c_in, co = idx / (s.kernel * s.c_in);
    const long off = s.offset(j);
    const long lo = std::max(0L, -off), hi = std::min(len, len - off);
    T acc = 0;
    for (std::size_t n = 0; n < s.batch; ++n) {
      const T* g = gy + (n * s.c_out + co) * s.length;
      const T* in = x + (n * s.c_in + ci) * s.length;
      for (long t = lo; t < hi; ++t) acc += g[t] * in[t + off];
    }
    gw[idx] = acc;
  }
}

namespace {
// Valid output range [lo, hi) for which oh*stride + kh - pad lands inside [0, extent).
struct Span {
  std::size_t lo, hi;
};
Span valid_outputs(std::size_t extent, std::size_t out_n, std::size_t stride, std::size_t kh, std::size_t pad) {
  std::size_t lo = 0;
  while (lo < out_n && lo * stride + kh < pad) ++lo;
  std::size_t hi = lo;
  while (hi < out_n && hi * stride + kh - pad < extent) ++hi;
  return {lo, hi};
}
}  // namespace

template <Real T>
void conv2d_forward(const Conv2dShape& s, const T* x, const T* w, const T* bias, T* y) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  const long planes = static_cast<long>(s.batch * s.c_out);
  const bool big = s.batch * s.c_out * s.c_in * k * k * oh_n * ow_n >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long r = 0; r < planes; ++r) {
    const std::size_t n = r / s.c_out, co = r % s.c_out;
    T* out = y + r * oh_n * ow_n;
    std::fill(out, out + oh_n * ow_n, T(0));
    for (std::size_t ci = 0; ci < s.c_in; ++ci) {
      const T* in = x + (n * s.c_in + ci) * s.height * s.width;
      for (std::size_t kh = 0; kh < k; ++kh) {
        const Span rows = valid_outputs(s.height, oh_n, s.stride, kh, s.pad);
        for (std::size_t kw = 0; kw < k; ++kw) {
          const Span cols = valid_outputs(s.width, ow_n, s.stride, kw, s.pad);
          const T wv = w[((co * s.c_in + ci) * k + kh) * k + kw];
          for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
            const T* irow = in + (oh * s.stride + kh - s.pad) * s.width;
            T* orow = out + oh * ow_n;
            for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) orow[ow] += wv * irow[ow * s.stride + kw - s.pad];
          }
        }
      }
    }
    if (bias)
      for (std::size_t i = 0; i < oh_n * ow_n; ++i) out[i] = out[i] + bias[co];
  }
}

template <Real T>
void conv2d_backward_input(const Conv2dShape& s, const T* gy, const T* w, T* gx) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  const long planes = static_cast<long>(s.batch * s.c_in);
  const bool big = s.batch * s.c_out * s.c_in * k * k * oh_n * ow_n >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long r = 0; r < planes; ++r) {
    const std::size_t n = r / s.c_in, ci = r % s.c_in;
    T* out = gx + r * s.height * s.width;
    std::fill(out, out + s.height * s.width, T(0));
    for (std::size_t co = 0; co < s.c_out; ++co) {
      const T* g = gy + (n * s.c_out + co) * oh_n * ow_n;
      for (std::size_t kh = 0; kh < k; ++kh) {
        const Span rows = valid_outputs(s.height, oh_n, s.stride, kh, s.pad);
        for (std::size_t kw = 0; kw < k; ++kw) {
          const Span cols = valid_outputs(s.width, ow_n, s.stride, kw, s.pad);
          const T wv = w[((co * s.c_in + ci) * k + kh) * k + kw];
          for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
            T* irow = out + (oh * s.stride + kh - s.pad) * s.width;
            const T* grow = g + oh * ow_n;
            for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) irow[ow * s.stride + kw - s.pad] += wv * grow[ow];
          }
        }
      }
    }
  }
}

template <Real T>
void conv2d_backward_weight(const Conv2dShape& s, const T* gy, const T* x, T* gw) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  const long taps = static_cast<long>(s.c_out * s.c_in * k * k);
  const bool big = s.batch * s.c_out * s.c_in * k * k * oh_n * ow_n >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (long idx = 0; idx < taps; ++idx) {
    const std::size_t kw = idx % k, kh = (idx / k) % k;
    const std::size_t ci = (idx / (k * k)) % s.c_in, co = idx / (k * k * s.c_in);
    const Span rows = valid_outputs(s.height, oh_n, s.stride, kh, s.pad);
    const Span cols = valid_outputs(s.width, ow_n, s.stride, kw, s.pad);
    T acc = 0;
    for (std::size_t n = 0; n < s.batch; ++n) {
      const T* g = gy + (n * s.c_out + co) * oh_n * ow_n;
      const T* in = x + (n * s.c_in + ci) * s.height * s.width;
      for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
        const T* irow = in + (oh * s.stride + kh - s.pad) * s.width;
        const T* grow = g + oh * ow_n;
        for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) acc += grow[ow] * irow[ow * s.stride + kw - s.pad];
      }
    }
    gw[idx] = acc;
  }
}

#define INSTANTIATE(T)                                                                  \
  template void gemm<T>(const GemmShape&, const T*, const T*, T*);                      \
  template void conv1d_forward<T>(const Conv1dShape&, const T*, const T*, const T*, T*); \
  template void conv1d_backward_input<T>(const Conv1dShape&, const T*, const T*, T*);   \
  template void conv1d_backward_weight<T>(const Conv1dShape&, const T*, const T*, T*);  \
  template void conv2d_forward<T>(const Conv2dShape&, const T*, const T*, const T*, T*); \
  template void conv2d_backward_input<T>(const Conv2dShape&, const T*, const T*, T*);   \
  template void conv2d_backward_weight<T>(const Conv2dShape&, const T*, const T*, T*);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp::kernels::parallel
