#include "sceneptp/kernels.hpp"

namespace sceneptp::kernels::serial {

template <Real T>
void gemm(const GemmShape& s, const T* a, const T* b, T* c) {
  for (std::size_t i = 0; i < s.m; ++i)
    for (std::size_t j = 0; j < s.n; ++j) {
      T acc = 0;
      for (std::size_t p = 0; p < s.k; ++p) {
        const T av = s.trans_a ? a[p * s.m + i] : a[i * s.k + p];
        const T bv = s.trans_b ? b[j * s.k + p] : b[p * s.n + j];
        acc += av * bv;
      }
      c[i * s.n + j] = acc;
    }
}

template <Real T>
void conv1d_forward(const Conv1dShape& s, const T* x, const T* w, const T* bias, T* y) {
  const long len = static_cast<long>(s.length);
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t co = 0; co < s.c_out; ++co)
      for (long t = 0; t < len; ++t) {
        T acc = 0;
        for (std::size_t ci = 0; ci < s.c_in; ++ci)
          for (std::size_t j = 0; j < s.kernel; ++j) {
            const long src = t + s.offset(j);
            if (src < 0 || src >= len) continue;
            acc += w[(co * s.c_in + ci) * s.kernel + j] * x[(n * s.c_in + ci) * s.length + src];
          }
        y[(n * s.c_out + co) * s.length + t] = bias ? acc + bias[co] : acc;
      }
}

template <Real T>
void conv1d_backward_input(const Conv1dShape& s, const T* gy, const T* w, T* gx) {
  const long len = static_cast<long>(s.length);
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t ci = 0; ci < s.c_in; ++ci)
      for (long src = 0; src < len; ++src) {
        T acc = 0;
        for (std::size_t co = 0; co < s.c_out; ++co)
          for (std::size_t j = 0; j < s.kernel; ++j) {
            const long t = src - s.offset(j);
            if (t < 0 || t >= len) continue;
            acc += w[(co * s.c_in + ci) * s.kernel + j] * gy[(n * s.c_out + co) * s.length + t];
          }
        gx[(n * s.c_in + ci) * s.length + src] = acc;
      }
}

template <Real T>
void conv1d_backward_weight(const Conv1dShape& s, const T* gy, const T* x, T* gw) {
  const long len = static_cast<long>(s.length);
  for (std::size_t co = 0; co < s.c_out; ++co)
    for (std::size_t ci = 0; ci < s.c_in; ++ci)
      for (std::size_t j = 0; j < s.kernel; ++j) {
        T acc = 0;
        for (std::size_t n = 0; n < s.batch; ++n)
          for (long t = 0; t < len; ++t) {
            const long src = t + s.offset(j);
            if (src < 0 || src >= len) continue;
            acc += gy[(n * s.c_out + co) * s.length + t] * x[(n * s.c_in + ci) * s.length + src];
          }
        gw[(co * s.c_in + ci) * s.kernel + j] = acc;
      }
}

template <Real T>
void conv2d_forward(const Conv2dShape& s, const T* x, const T* w, const T* bias, T* y) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t co = 0; co < s.c_out; ++co)
      for (std::size_t oh = 0; oh < oh_n; ++oh)
        for (std::size_t ow = 0; ow < ow_n; ++ow) {
          T acc = 0;
          for (std::size_t ci = 0; ci < s.c_in; ++ci)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long ih = static_cast<long>(oh * s.stride + kh) - static_cast<long>(s.pad);
                const long iw = static_cast<long>(ow * s.stride + kw) - static_cast<long>(s.pad);
                if (ih < 0 || iw < 0 || ih >= static_cast<long>(s.height) || iw >= static_cast<long>(s.width))
                  continue;
                acc += w[((co * s.c_in + ci) * k + kh) * k + kw] *
                       x[((n * s.c_in + ci) * s.height + ih) * s.width + iw];
              }
          y[((n * s.c_out + co) * oh_n + oh) * ow_n + ow] = bias ? acc + bias[co] : acc;
        }
}

template <Real T>
void conv2d_backward_input(const Conv2dShape& s, const T* gy, const T* w, T* gx) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t ci = 0; ci < s.c_in; ++ci)
      for (std::size_t ih = 0; ih < s.height; ++ih)
        for (std::size_t iw = 0; iw < s.width; ++iw) {
          T acc = 0;
          for (std::size_t co = 0; co < s.c_out; ++co)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long nh = static_cast<long>(ih + s.pad) - static_cast<long>(kh);
                const long nw = static_cast<long>(iw + s.pad) - static_cast<long>(kw);
                if (nh < 0 || nw < 0) continue;
                if (nh % static_cast<long>(s.stride) || nw % static_cast<long>(s.stride)) continue;
                const std::size_t oh = nh / s.stride, ow = nw / s.stride;
                if (oh >= oh_n || ow >= ow_n) continue;
                acc += w[((co * s.c_in + ci) * k + kh) * k + kw] * gy[((n * s.c_out + co) * oh_n + oh) * ow_n + ow];
              }
          gx[((n * s.c_in + ci) * s.height + ih) * s.width + iw] = acc;
        }
}

template <Real T>
void conv2d_backward_weight(const Conv2dShape& s, const T* gy, const T* x, T* gw) {
  const std::size_t oh_n = s.out_height(), ow_n = s.out_width(), k = s.kernel;
  for (std::size_t co = 0; co < s.c_out; ++co)
    for (std::size_t ci = 0; ci < s.c_in; ++ci)
      for (std::size_t kh = 0; kh < k; ++kh)
        for (std::size_t kw = 0; kw < k; ++kw) {
          T acc = 0;
          for (std::size_t n = 0; n < s.batch; ++n)
            for (std::size_t oh = 0; oh < oh_n; ++oh)
              for (std::size_t ow = 0; ow < ow_n; ++ow) {
                const long ih = static_cast<long>(oh * s.stride + kh) - static_cast<long>(s.pad);
                const long iw = static_cast<long>(ow * s.stride + kw) - static_cast<long>(s.pad);
                if (ih < 0 || iw < 0 || ih >= static_cast<long>(s.height) || iw >= static_cast<long>(s.width))
                  continue;
                acc += gy[((n * s.c_out + co) * oh_n + oh) * ow_n + ow] *
                       x[((n * s.c_in + ci) * s.height + ih) * s.width + iw];
              }
          gw[((co * s.c_in + ci) * k + kh) * k + kw] = acc;
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

}  // namespace sceneptp::kernels::serial
