#include "sceneptp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sceneptp/errors.hpp"
#include "sceneptp/kernels.hpp"

namespace sceneptp {

namespace {

template <Real T>
using Node = detail::Node<T>;
template <Real T>
using Backward = std::function<void(Node<T>&)>;

template <Real T>
Tensor<T> record(Shape shape, std::vector<T> data, const char* op, std::vector<Tensor<T>> inputs,
                 Backward<T> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->seq = detail::next_sequence();
  node->op = op;
  const bool track = GradMode::enabled() && std::any_of(inputs.begin(), inputs.end(), [](const Tensor<T>& t) {
                       return t.defined() && t.requires_grad();
                     });
  if (track) {
    node->requires_grad = true;
    for (auto& in : inputs) node->inputs.push_back(in.defined() ? in.node() : nullptr);
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

// Gradient buffer of input i, or null when that input does not need one.
template <Real T>
T* grad_of(Node<T>& self, std::size_t i) {
  auto& in = self.inputs[i];
  if (!in || !in->requires_grad) return nullptr;
  in->ensure_grad();
  return in->grad.data();
}

template <Real T>
const std::vector<T>& data_of(Node<T>& self, std::size_t i) {
  return self.inputs[i]->data;
}

std::size_t norm_axis(int axis, std::size_t rank, const Shape& shape) {
  const int r = static_cast<int>(rank);
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r)
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape));
  return static_cast<std::size_t>(a);
}

// Leading-batch broadcast: the shorter shape must be a suffix of the longer.
Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  const Shape& lng = a.size() >= b.size() ? a : b;
  const Shape& shr = a.size() >= b.size() ? b : a;
  if (!std::equal(shr.begin(), shr.end(), lng.end() - static_cast<long>(shr.size())))
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                         " are not leading-batch broadcastable");
  return lng;
}

struct AxisSplit {
  std::size_t outer, len, inner;
};
AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

Shape without_axis(const Shape& s, std::size_t axis) {
  Shape r = s;
  r.erase(r.begin() + static_cast<long>(axis));
  return r;
}

template <Real T>
bool sorted_before(T a, T b) {
  return a < b || (a == b && std::signbit(a) && !std::signbit(b));
}

template <Real T>
T sorted_sum(std::vector<T>& terms) {
  std::sort(terms.begin(), terms.end(), sorted_before<T>);
  T acc = 0;
  for (T v : terms) acc += v;
  return acc;
}

enum class BinaryOp { kAdd, kSub, kMul };

template <Real T>
Tensor<T> binary(const Tensor<T>& a, const Tensor<T>& b, BinaryOp kind, const char* name) {
  const Shape out = broadcast_shape(a.shape(), b.shape(), name);
  const std::size_t n = shape_numel(out), na = a.numel(), nb = b.numel();
  std::vector<T> y(n);
  const auto ad = a.data(), bd = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    const T av = ad[i % na], bv = bd[i % nb];
    y[i] = kind == BinaryOp::kAdd ? av + bv : kind == BinaryOp::kSub ? av - bv : av * bv;
  }
  return record<T>(out, std::move(y), name, {a, b}, [kind, n, na, nb](Node<T>& self) {
    const auto& g = self.grad;
    if (T* ga = grad_of(self, 0)) {
      const auto& bd = data_of(self, 1);
      for (std::size_t i = 0; i < n; ++i) ga[i % na] += kind == BinaryOp::kMul ? g[i] * bd[i % nb] : g[i];
    }
    if (T* gb = grad_of(self, 1)) {
      const auto& ad = data_of(self, 0);
      for (std::size_t i = 0; i < n; ++i)
        gb[i % nb] += kind == BinaryOp::kAdd ? g[i] : kind == BinaryOp::kSub ? -g[i] : g[i] * ad[i % na];
    }
  });
}

}  // namespace

template <Real T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryOp::kAdd, "add");
}

template <Real T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryOp::kSub, "sub");
}

template <Real T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryOp::kMul, "mul");
}

template <Real T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> y(a.data().begin(), a.data().end());
  for (auto& v : y) v *= factor;
  return record<T>(a.shape(), std::move(y), "scale", {a}, [factor](Node<T>& self) {
    if (T* ga = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * factor;
  });
}

template <Real T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> y(x.data().begin(), x.data().end());
  for (auto& v : y) v = v > 0 ? v : T(0);
  return record<T>(x.shape(), std::move(y), "relu", {x}, [](Node<T>& self) {
    if (T* gx = grad_of(self, 0)) {
      const auto& xd = data_of(self, 0);
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        if (xd[i] > 0) gx[i] += self.grad[i];
    }
  });
}

template <Real T>
Tensor<T> prelu(const Tensor<T>& x, const Tensor<T>& slope) {
  if (slope.numel() != 1) throw DimensionError("prelu: slope must have one element, got " + shape_str(slope.shape()));
  const T a = slope.data()[0];
  std::vector<T> y(x.data().begin(), x.data().end());
  for (auto& v : y) v = v > 0 ? v : a * v;
  return record<T>(x.shape(), std::move(y), "prelu", {x, slope}, [](Node<T>& self) {
    const auto& xd = data_of(self, 0);
    const T a = data_of(self, 1)[0];
    const auto& g = self.grad;
    if (T* gx = grad_of(self, 0))
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += xd[i] > 0 ? g[i] : a * g[i];
    if (T* gs = grad_of(self, 1)) {
      T acc = 0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (!(xd[i] > 0)) acc += g[i] * xd[i];
      gs[0] += acc;
    }
  });
}

template <Real T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() < 2 || b.rank() < 2)
    throw DimensionError("matmul: operands need rank >= 2, got " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  const std::size_t m = a.dim(-2), k = a.dim(-1), n = b.dim(-1);
  if (b.dim(-2) != k)
    throw DimensionError("matmul: inner extents differ for " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const Shape ba(a.shape().begin(), a.shape().end() - 2), bb(b.shape().begin(), b.shape().end() - 2);
  Shape out;
  try {
    out = broadcast_shape(ba, bb, "matmul");
  } catch (const DimensionError&) {
    throw DimensionError("matmul: batch extents of " + shape_str(a.shape()) + " and " + shape_str(b.shape()) +
                         " are not leading-batch broadcastable");
  }
  const std::size_t batches = shape_numel(out), nba = shape_numel(ba), nbb = shape_numel(bb);
  out.push_back(m);
  out.push_back(n);
  std::vector<T> y(batches * m * n);
  const auto ad = a.data(), bd = b.data();
  for (std::size_t bi = 0; bi < batches; ++bi)
    kernels::parallel::gemm<T>({m, n, k}, ad.data() + (bi % nba) * m * k, bd.data() + (bi % nbb) * k * n,
                               y.data() + bi * m * n);
  return record<T>(out, std::move(y), "matmul", {a, b}, [=](Node<T>& self) {
    const T* g = self.grad.data();
    std::vector<T> tmp;
    if (T* ga = grad_of(self, 0)) {
      const auto& bdat = data_of(self, 1);
      tmp.resize(m * k);
      for (std::size_t bi = 0; bi < batches; ++bi) {
        kernels::parallel::gemm<T>({m, k, n, false, true}, g + bi * m * n, bdat.data() + (bi % nbb) * k * n,
                                   tmp.data());
        T* dst = ga + (bi % nba) * m * k;
        for (std::size_t i = 0; i < m * k; ++i) dst[i] += tmp[i];
      }
    }
    if (T* gb = grad_of(self, 1)) {
      const auto& adat = data_of(self, 0);
      tmp.resize(k * n);
      for (std::size_t bi = 0; bi < batches; ++bi) {
        kernels::parallel::gemm<T>({k, n, m, true, false}, adat.data() + (bi % nba) * m * k, g + bi * m * n,
                                   tmp.data());
        T* dst = gb + (bi % nbb) * k * n;
        for (std::size_t i = 0; i < k * n; ++i) dst[i] += tmp[i];
      }
    }
  });
}

template <Real T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (w.rank() != 2) throw DimensionError("linear: weight must be [in, out], got " + shape_str(w.shape()));
  if (x.dim(-1) != w.dim(0))
    throw DimensionError("linear: input " + shape_str(x.shape()) + " does not match weight " + shape_str(w.shape()));
  Tensor<T> y;
  if (x.rank() == 1) {
    y = reshape(matmul(reshape(x, {1, x.dim(0)}), w), {w.dim(1)});
  } else {
    y = matmul(x, w);
  }
  return b.defined() ? add(y, b) : y;
}

template <Real T>
Tensor<T> reshape(const Tensor<T>& x, const Shape& shape) {
  if (shape_numel(shape) != x.numel())
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  std::vector<T> y(x.data().begin(), x.data().end());
  return record<T>(shape, std::move(y), "reshape", {x}, [](Node<T>& self) {
    if (T* gx = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
  });
}

template <Real T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order) {
  const std::size_t r = x.rank();
  std::vector<std::size_t> check = order;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < r; ++i)
    if (check.size() != r || check[i] != i)
      throw DimensionError("permute: invalid axis order for shape " + shape_str(x.shape()));
  const Shape& in = x.shape();
  Shape out(r);
  for (std::size_t i = 0; i < r; ++i) out[i] = in[order[i]];
  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t i = r; i-- > 1;) in_stride[i - 1] = in_stride[i] * in[i];
  // source[i] = flat input index of output element i
  const std::size_t n = x.numel();
  std::vector<std::size_t> source(n);
  std::vector<std::size_t> idx(r, 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < r; ++a) src += idx[a] * in_stride[order[a]];
    source[flat] = src;
    for (std::size_t a = r; a-- > 0;) {
      if (++idx[a] < out[a]) break;
      idx[a] = 0;
    }
  }
  std::vector<T> y(n);
  const auto xd = x.data();
  for (std::size_t i = 0; i < n; ++i) y[i] = xd[source[i]];
  return record<T>(out, std::move(y), "permute", {x}, [source = std::move(source)](Node<T>& self) {
    if (T* gx = grad_of(self, 0))
      for (std::size_t i = 0; i < source.size(); ++i) gx[source[i]] += self.grad[i];
  });
}

template <Real T>
Tensor<T> transpose(const Tensor<T>& x) {
  if (x.rank() < 2) throw DimensionError("transpose: rank < 2 for " + shape_str(x.shape()));
  std::vector<std::size_t> order(x.rank());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[x.rank() - 1], order[x.rank() - 2]);
  return permute(x, order);
}

template <Real T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  const Shape& first = parts[0].shape();
  const std::size_t ax = norm_axis(axis, first.size(), first);
  Shape out = first;
  out[ax] = 0;
  for (const auto& p : parts) {
    bool ok = p.rank() == first.size();
    for (std::size_t i = 0; ok && i < first.size(); ++i)
      if (i != ax && p.shape()[i] != first[i]) ok = false;
    if (!ok) throw DimensionError("concat: " + shape_str(p.shape()) + " incompatible with " + shape_str(first));
    out[ax] += p.shape()[ax];
  }
  const AxisSplit total = split_at(out, ax);
  std::vector<std::size_t> blocks;  // contiguous block length per part
  for (const auto& p : parts) blocks.push_back(p.shape()[ax] * total.inner);
  const std::size_t row = total.len * total.inner;
  std::vector<T> y(shape_numel(out));
  std::size_t offset = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const auto pd = parts[pi].data();
    for (std::size_t o = 0; o < total.outer; ++o)
      std::copy_n(pd.data() + o * blocks[pi], blocks[pi], y.data() + o * row + offset);
    offset += blocks[pi];
  }
  return record<T>(out, std::move(y), "concat", parts, [blocks, row, outer = total.outer](Node<T>& self) {
    std::size_t offset = 0;
    for (std::size_t pi = 0; pi < blocks.size(); ++pi) {
      if (T* gp = grad_of(self, pi))
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < blocks[pi]; ++i) gp[o * blocks[pi] + i] += self.grad[o * row + offset + i];
      offset += blocks[pi];
    }
  });
}

template <Real T>
Tensor<T> select(const Tensor<T>& x, int axis, std::size_t index) {
  const std::size_t ax = norm_axis(axis, x.rank(), x.shape());
  const AxisSplit s = split_at(x.shape(), ax);
  if (index >= s.len)
    throw DimensionError("select: index " + std::to_string(index) + " out of range for " + shape_str(x.shape()));
  std::vector<T> y(s.outer * s.inner);
  const auto xd = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) y[o * s.inner + i] = xd[(o * s.len + index) * s.inner + i];
  return record<T>(without_axis(x.shape(), ax), std::move(y), "select", {x}, [s, index](Node<T>& self) {
    if (T* gx = grad_of(self, 0))
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i) gx[(o * s.len + index) * s.inner + i] += self.grad[o * s.inner + i];
  });
}

template <Real T>
Tensor<T> softmax(const Tensor<T>& x, int axis) {
  const std::size_t ax = norm_axis(axis, x.rank(), x.shape());
  const AxisSplit s = split_at(x.shape(), ax);
  std::vector<T> y(x.numel());
  const auto xd = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.len * s.inner + i;
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t l = 0; l < s.len; ++l) mx = std::max(mx, xd[base + l * s.inner]);
      T den = 0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const T e = std::exp(xd[base + l * s.inner] - mx);
        y[base + l * s.inner] = e;
        den += e;
      }
      for (std::size_t l = 0; l < s.len; ++l) y[base + l * s.inner] /= den;
    }
  return record<T>(x.shape(), std::move(y), "softmax", {x}, [s](Node<T>& self) {
    T* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& y = self.data;
    const auto& g = self.grad;
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t base = o * s.len * s.inner + i;
        T dot = 0;
        for (std::size_t l = 0; l < s.len; ++l) dot += g[base + l * s.inner] * y[base + l * s.inner];
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t p = base + l * s.inner;
          gx[p] += y[p] * (g[p] - dot);
        }
      }
  });
}

template <Real T>
Tensor<T> masked_softmax(const Tensor<T>& scores, const Mask& mask) {
  if (mask.shape != scores.shape() || mask.keep.size() != scores.numel())
    throw DimensionError("masked_softmax: mask " + shape_str(mask.shape) + " does not match scores " +
                         shape_str(scores.shape()));
  if (scores.rank() < 1) throw DimensionError("masked_softmax: scalar input");
  const std::size_t len = scores.dim(-1), rows = scores.numel() / len;
  const auto sd = scores.data();
  std::vector<T> y(scores.numel(), T(0));
  std::vector<T> terms;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * len;
    T mx = -std::numeric_limits<T>::infinity();
    bool any = false;
    for (std::size_t l = 0; l < len; ++l)
      if (mask.keep[base + l]) {
        mx = std::max(mx, sd[base + l]);
        any = true;
      }
    if (!any) throw ContractError("masked_softmax: row " + std::to_string(r) + " keeps no entries");
    terms.clear();
    for (std::size_t l = 0; l < len; ++l)
      if (mask.keep[base + l]) {
        y[base + l] = std::exp(sd[base + l] - mx);
        terms.push_back(y[base + l]);
      }
    const T den = sorted_sum(terms);
    for (std::size_t l = 0; l < len; ++l)
      if (mask.keep[base + l]) y[base + l] /= den;
  }
  return record<T>(scores.shape(), std::move(y), "masked_softmax", {scores}, [keep = mask.keep, len](Node<T>& self) {
    T* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& y = self.data;
    const auto& g = self.grad;
    for (std::size_t base = 0; base < y.size(); base += len) {
      T dot = 0;
      for (std::size_t l = 0; l < len; ++l)
        if (keep[base + l]) dot += g[base + l] * y[base + l];
      for (std::size_t l = 0; l < len; ++l)
        if (keep[base + l]) gx[base + l] += y[base + l] * (g[base + l] - dot);
    }
  });
}

template <Real T>
Tensor<T> sparse_aggregate(const Tensor<T>& weights, const Mask& mask, const Tensor<T>& x) {
  if (weights.rank() != 3 || x.rank() != 3 || weights.dim(0) != x.dim(0) || weights.dim(2) != x.dim(1))
    throw DimensionError("sparse_aggregate: weights " + shape_str(weights.shape()) + " incompatible with features " +
                         shape_str(x.shape()));
  if (mask.shape != weights.shape() || mask.keep.size() != weights.numel())
    throw DimensionError("sparse_aggregate: mask " + shape_str(mask.shape) + " does not match weights " +
                         shape_str(weights.shape()));
  const std::size_t B = weights.dim(0), R = weights.dim(1), C = weights.dim(2), D = x.dim(2);
  const auto wd = weights.data(), xd = x.data();
  std::vector<T> y(B * R * D);
  std::vector<T> terms;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t d = 0; d < D; ++d) {
        terms.clear();
        for (std::size_t c = 0; c < C; ++c) {
          const std::size_t wi = (b * R + r) * C + c;
          if (mask.keep[wi]) terms.push_back(wd[wi] * xd[(b * C + c) * D + d]);
        }
        y[(b * R + r) * D + d] = sorted_sum(terms);
      }
  return record<T>({B, R, D}, std::move(y), "sparse_aggregate", {weights, x},
                   [keep = mask.keep, B, R, C, D](Node<T>& self) {
                     const auto& g = self.grad;
                     if (T* gw = grad_of(self, 0)) {
                       const auto& xd = data_of(self, 1);
                       for (std::size_t b = 0; b < B; ++b)
                         for (std::size_t r = 0; r < R; ++r)
                           for (std::size_t c = 0; c < C; ++c) {
                             const std::size_t wi = (b * R + r) * C + c;
                             if (!keep[wi]) continue;
                             T acc = 0;
                             for (std::size_t d = 0; d < D; ++d) acc += g[(b * R + r) * D + d] * xd[(b * C + c) * D + d];
                             gw[wi] += acc;
                           }
                     }
                     if (T* gx = grad_of(self, 1)) {
                       const auto& wd = data_of(self, 0);
                       for (std::size_t b = 0; b < B; ++b)
                         for (std::size_t r = 0; r < R; ++r)
                           for (std::size_t c = 0; c < C; ++c) {
                             const std::size_t wi = (b * R + r) * C + c;
                             if (!keep[wi]) continue;
                             for (std::size_t d = 0; d < D; ++d)
                               gx[(b * C + c) * D + d] += wd[wi] * g[(b * R + r) * D + d];
                           }
                     }
                   });
}

template <Real T>
Tensor<T> sum(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  return record<T>({}, {acc}, "sum", {x}, [](Node<T>& self) {
    if (T* gx = grad_of(self, 0)) {
      const T g = self.grad[0];
      for (std::size_t i = 0; i < self.inputs[0]->data.size(); ++i) gx[i] += g;
    }
  });
}

template <Real T>
Tensor<T> mean(const Tensor<T>& x, int axis) {
  const std::size_t ax = norm_axis(axis, x.rank(), x.shape());
  const AxisSplit s = split_at(x.shape(), ax);
  std::vector<T> y(s.outer * s.inner, T(0));
  const auto xd = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      T acc = 0;
      for (std::size_t l = 0; l < s.len; ++l) acc += xd[(o * s.len + l) * s.inner + i];
      y[o * s.inner + i] = acc / static_cast<T>(s.len);
    }
  return record<T>(without_axis(x.shape(), ax), std::move(y), "mean", {x}, [s](Node<T>& self) {
    if (T* gx = grad_of(self, 0))
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i) {
          const T g = self.grad[o * s.inner + i] / static_cast<T>(s.len);
          for (std::size_t l = 0; l < s.len; ++l) gx[(o * s.len + l) * s.inner + i] += g;
        }
  });
}

template <Real T>
Tensor<T> mean_all(const Tensor<T>& x) {
  return scale(sum(x), T(1) / static_cast<T>(x.numel()));
}

template <Real T>
Tensor<T> l2norm(const Tensor<T>& x, int axis) {
  const std::size_t ax = norm_axis(axis, x.rank(), x.shape());
  const AxisSplit s = split_at(x.shape(), ax);
  std::vector<T> y(s.outer * s.inner);
  const auto xd = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      T acc = 0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const T v = xd[(o * s.len + l) * s.inner + i];
        acc += v * v;
      }
      y[o * s.inner + i] = std::sqrt(acc);
    }
  return record<T>(without_axis(x.shape(), ax), std::move(y), "l2norm", {x}, [s](Node<T>& self) {
    T* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& xd = data_of(self, 0);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.inner; ++i) {
        const T norm = self.data[o * s.inner + i];
        if (norm == 0) continue;
        const T g = self.grad[o * s.inner + i] / norm;
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t p = (o * s.len + l) * s.inner + i;
          gx[p] += g * xd[p];
        }
      }
  });
}

template <Real T>
Tensor<T> cumsum(const Tensor<T>& x, int axis) {
  const std::size_t ax = norm_axis(axis, x.rank(), x.shape());
  const AxisSplit s = split_at(x.shape(), ax);
  std::vector<T> y(x.numel());
  const auto xd = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      T acc = 0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const std::size_t p = (o * s.len + l) * s.inner + i;
        acc += xd[p];
        y[p] = acc;
      }
    }
  return record<T>(x.shape(), std::move(y), "cumsum", {x}, [s](Node<T>& self) {
    T* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.inner; ++i) {
        T acc = 0;
        for (std::size_t l = s.len; l-- > 0;) {
          const std::size_t p = (o * s.len + l) * s.inner + i;
          acc += self.grad[p];
          gx[p] += acc;
        }
      }
  });
}

template <Real T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias, std::size_t dilation,
                 Padding padding) {
  if (x.rank() != 3 || kernel.rank() != 3)
    throw DimensionError("conv1d: expected x [N,C,T] and kernel [C_out,C_in,k], got " + shape_str(x.shape()) + " and " +
                         shape_str(kernel.shape()));
  if (kernel.dim(1) != x.dim(1))
    throw DimensionError("conv1d: channel mismatch, input " + shape_str(x.shape()) + " vs kernel " +
                         shape_str(kernel.shape()));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != kernel.dim(0)))
    throw DimensionError("conv1d: bias " + shape_str(bias.shape()) + " does not match kernel " +
                         shape_str(kernel.shape()));
  if (dilation < 1) throw ContractError("conv1d: dilation must be positive");
  if (padding == Padding::kSymmetric && kernel.dim(2) % 2 == 0)
    throw ContractError("conv1d: same-symmetric padding needs an odd kernel, got " + std::to_string(kernel.dim(2)));
  const kernels::Conv1dShape s{x.dim(0), x.dim(1), kernel.dim(0), x.dim(2), kernel.dim(2), dilation,
                               padding == Padding::kCausal};
  std::vector<T> y(s.batch * s.c_out * s.length);
  kernels::parallel::conv1d_forward<T>(s, x.data().data(), kernel.data().data(),
                                       bias.defined() ? bias.data().data() : nullptr, y.data());
  return record<T>({s.batch, s.c_out, s.length}, std::move(y), "conv1d", {x, kernel, bias}, [s](Node<T>& self) {
    const T* g = self.grad.data();
    std::vector<T> tmp;
    if (T* gx = grad_of(self, 0)) {
      tmp.resize(s.batch * s.c_in * s.length);
      kernels::parallel::conv1d_backward_input<T>(s, g, data_of(self, 1).data(), tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) gx[i] += tmp[i];
    }
    if (T* gw = grad_of(self, 1)) {
      tmp.resize(s.c_out * s.c_in * s.kernel);
      kernels::parallel::conv1d_backward_weight<T>(s, g, data_of(self, 0).data(), tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) gw[i] += tmp[i];
    }
    if (T* gb = grad_of(self, 2))
      for (std::size_t co = 0; co < s.c_out; ++co) {
        T acc = 0;
        for (std::size_t n = 0; n < s.batch; ++n)
          for (std::size_t t = 0; t < s.length; ++t) acc += g[(n * s.c_out + co) * s.length + t];
        gb[co] += acc;
      }
  });
}

template <Real T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias, std::size_t stride) {
  if (x.rank() != 4 || kernel.rank() != 4 || kernel.dim(2) != kernel.dim(3))
    throw DimensionError("conv2d: expected x [N,C,H,W] and square kernel [C_out,C_in,k,k], got " +
                         shape_str(x.shape()) + " and " + shape_str(kernel.shape()));
  if (kernel.dim(1) != x.dim(1))
    throw DimensionError("conv2d: channel mismatch, input " + shape_str(x.shape()) + " vs kernel " +
                         shape_str(kernel.shape()));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != kernel.dim(0)))
    throw DimensionError("conv2d: bias " + shape_str(bias.shape()) + " does not match kernel " +
                         shape_str(kernel.shape()));
  if (kernel.dim(2) % 2 == 0) throw ContractError("conv2d: kernel extent must be odd");
  if (stride < 1) throw ContractError("conv2d: stride must be positive");
  const kernels::Conv2dShape s{x.dim(0), x.dim(1), kernel.dim(0), x.dim(2), x.dim(3), kernel.dim(2), stride,
                               kernel.dim(2) / 2};
  const std::size_t oh = s.out_height(), ow = s.out_width();
  std::vector<T> y(s.batch * s.c_out * oh * ow);
  kernels::parallel::conv2d_forward<T>(s, x.data().data(), kernel.data().data(),
                                       bias.defined() ? bias.data().data() : nullptr, y.data());
  return record<T>({s.batch, s.c_out, oh, ow}, std::move(y), "conv2d", {x, kernel, bias}, [s, oh, ow](Node<T>& self) {
    const T* g = self.grad.data();
    std::vector<T> tmp;
    if (T* gx = grad_of(self, 0)) {
      tmp.resize(s.batch * s.c_in * s.height * s.width);
      kernels::parallel::conv2d_backward_input<T>(s, g, data_of(self, 1).data(), tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) gx[i] += tmp[i];
    }
    if (T* gw = grad_of(self, 1)) {
      tmp.resize(s.c_out * s.c_in * s.kernel * s.kernel);
      kernels::parallel::conv2d_backward_weight<T>(s, g, data_of(self, 0).data(), tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) gw[i] += tmp[i];
    }
    if (T* gb = grad_of(self, 2))
      for (std::size_t co = 0; co < s.c_out; ++co) {
        T acc = 0;
        for (std::size_t n = 0; n < s.batch; ++n)
          for (std::size_t i = 0; i < oh * ow; ++i) acc += g[(n * s.c_out + co) * oh * ow + i];
        gb[co] += acc;
      }
  });
}

#define INSTANTIATE(T)                                                                                       \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> scale(const Tensor<T>&, T);                                                             \
  template Tensor<T> relu(const Tensor<T>&);                                                                 \
  template Tensor<T> prelu(const Tensor<T>&, const Tensor<T>&);                                              \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                             \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> reshape(const Tensor<T>&, const Shape&);                                                \
  template Tensor<T> permute(const Tensor<T>&, const std::vector<std::size_t>&);                             \
  template Tensor<T> transpose(const Tensor<T>&);                                                            \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, int);                                             \
  template Tensor<T> select(const Tensor<T>&, int, std::size_t);                                             \
  template Tensor<T> softmax(const Tensor<T>&, int);                                                         \
  template Tensor<T> masked_softmax(const Tensor<T>&, const Mask&);                                          \
  template Tensor<T> sparse_aggregate(const Tensor<T>&, const Mask&, const Tensor<T>&);                      \
  template Tensor<T> sum(const Tensor<T>&);                                                                  \
  template Tensor<T> mean(const Tensor<T>&, int);                                                            \
  template Tensor<T> mean_all(const Tensor<T>&);                                                             \
  template Tensor<T> l2norm(const Tensor<T>&, int);                                                          \
  template Tensor<T> cumsum(const Tensor<T>&, int);                                                          \
  template Tensor<T> conv1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t, Padding);     \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
