#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "sceneptp/errors.hpp"
#include "sceneptp/ops.hpp"
#include "support.hpp"

using namespace sceneptp;
using testing::TD;
using testing::grad_check;
using testing::project;
using testing::random_tensor;

namespace {
constexpr double kTol = 1e-4;

Mask random_mask(const Shape& shape, std::mt19937_64& gen, bool keep_diagonal) {
  Mask m{shape, std::vector<std::uint8_t>(shape_numel(shape))};
  std::bernoulli_distribution keep(0.6);
  const std::size_t c = shape.back(), r = shape[shape.size() - 2];
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    m.keep[i] = keep(gen);
    if (keep_diagonal && (i / c) % r == i % c) m.keep[i] = 1;
  }
  return m;
}
}  // namespace

TEST_CASE("tensor factories validate shapes") {
  CHECK_THROWS_AS(TD::from({2, 3}, std::vector<double>(5)), DimensionError);
  const TD s = TD::scalar(3.5);
  CHECK(s.rank() == 0);
  CHECK(s.item() == 3.5);
  const TD z = TD::zeros({2, 2});
  CHECK(z.numel() == 4);
  CHECK_THROWS_AS(z.item(), ContractError);
  const TD t = TD::from({2, 3}, {0, 1, 2, 3, 4, 5});
  CHECK(t.at({1, 2}) == 5);
  CHECK(t.dim(-1) == 3);
}

TEST_CASE("recorded op outputs are not writable") {
  const TD a = testing::leaf(TD::from({2}, {1, 2}));
  TD b = add(a, a);
  CHECK_THROWS_AS(b.mutable_data(), ContractError);
}

TEST_CASE("elementwise ops broadcast over leading batch axes only") {
  const TD a = TD::from({2, 3}, {1, 2, 3, 4, 5, 6});
  const TD b = TD::from({3}, {10, 20, 30});
  const TD c = add(a, b);
  CHECK(c.shape() == Shape{2, 3});
  CHECK(c.at({1, 2}) == 36);
  CHECK(add(b, a).at({0, 0}) == 11);
  CHECK(sub(a, b).at({0, 1}) == -18);
  CHECK(mul(a, b).at({1, 0}) == 40);
  CHECK_THROWS_AS(add(a, TD::from({2}, {1, 2})), DimensionError);
}

TEST_CASE("matmul agrees with a triple-loop oracle") {
  std::mt19937_64 gen(1);
  const TD a = random_tensor({3, 4, 5}, gen), b = random_tensor({5, 2}, gen);
  const TD c = matmul(a, b);
  REQUIRE(c.shape() == Shape{3, 4, 2});
  for (std::size_t bt = 0; bt < 3; ++bt)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < 5; ++k) s += a.at({bt, i, k}) * b.at({k, j});
        CHECK(c.at({bt, i, j}) == doctest::Approx(s).epsilon(1e-12));
      }
  CHECK_THROWS_AS(matmul(a, random_tensor({4, 2}, gen)), DimensionError);
}

TEST_CASE("softmax rows sum to one and masked entries are exactly zero") {
  std::mt19937_64 gen(2);
  const TD x = random_tensor({2, 3, 5}, gen, -3, 3);
  const TD s = softmax(x, -1);
  for (std::size_t r = 0; r < 6; ++r) {
    double sum = 0;
    for (std::size_t c = 0; c < 5; ++c) sum += s.data()[r * 5 + c];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Mask m = random_mask({2, 3, 5}, gen, true);
  const TD ms = masked_softmax(x, m);
  for (std::size_t i = 0; i < m.keep.size(); ++i)
    if (!m.keep[i]) CHECK(ms.data()[i] == 0.0);
}

TEST_CASE("masked_softmax and sparse_aggregate ignore the order of kept entries") {
  std::mt19937_64 gen(3);
  const std::size_t n = 6;
  const TD scores = random_tensor({1, n, n}, gen, -2, 2);
  const TD x = random_tensor({1, n, 4}, gen);
  const Mask m = random_mask({1, n, n}, gen, true);
  const TD w = masked_softmax(scores, m);
  const TD y = sparse_aggregate(w, m, x);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<double> ps(n * n), px(n * 4);
  Mask pm{{1, n, n}, std::vector<std::uint8_t>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ps[i * n + j] = scores.data()[perm[i] * n + perm[j]];
      pm.keep[i * n + j] = m.keep[perm[i] * n + perm[j]];
    }
    for (std::size_t d = 0; d < 4; ++d) px[i * 4 + d] = x.data()[perm[i] * 4 + d];
  }
  const TD pw = masked_softmax(TD::from({1, n, n}, ps), pm);
  const TD py = sparse_aggregate(pw, pm, TD::from({1, n, 4}, px));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < 4; ++d) CHECK(py.data()[i * 4 + d] == y.data()[perm[i] * 4 + d]);
}

TEST_CASE("cumsum matches a prefix-sum oracle") {
  std::mt19937_64 gen(4);
  const TD x = random_tensor({2, 5, 3}, gen);
  const TD c = cumsum(x, 1);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t d = 0; d < 3; ++d) {
      double s = 0;
      for (std::size_t t = 0; t < 5; ++t) {
        s += x.at({b, t, d});
        CHECK(c.at({b, t, d}) == doctest::Approx(s).epsilon(1e-12));
      }
    }
}

TEST_CASE("l2norm of a 3-4 vector is 5 and its gradient at zero is zero") {
  TD v = TD::from({1, 2}, {3, 4});
  CHECK(l2norm(v, -1).item() == 5.0);
  TD z = testing::leaf(TD::zeros({2}));
  TD n = sum(l2norm(z, 0));
  backward(n);
  CHECK(z.grad()[0] == 0.0);
  CHECK(z.grad()[1] == 0.0);
}

TEST_CASE("conv1d causal output at t only depends on inputs up to t") {
  std::mt19937_64 gen(5);
  const TD x = random_tensor({1, 2, 8}, gen), w = random_tensor({3, 2, 3}, gen);
  const TD y = conv1d(x, w, TD(), 2, Padding::kCausal);
  std::vector<double> xp(x.data().begin(), x.data().end());
  for (std::size_t c = 0; c < 2; ++c) xp[c * 8 + 6] += 1.0;
  const TD yp = conv1d(TD::from({1, 2, 8}, xp), w, TD(), 2, Padding::kCausal);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 6; ++t) CHECK(yp.at({0, c, t}) == y.at({0, c, t}));
  CHECK_THROWS_AS(conv1d(x, random_tensor({3, 2, 2}, gen), TD(), 1, Padding::kSymmetric), ContractError);
  CHECK_THROWS_AS(conv1d(x, random_tensor({3, 4, 3}, gen), TD(), 1, Padding::kCausal), DimensionError);
}

TEST_CASE("conv2d matches a direct loop oracle") {
  std::mt19937_64 gen(6);
  const std::size_t c_in = 2, c_out = 3, h = 7, w = 6, stride = 2;
  const TD x = random_tensor({1, c_in, h, w}, gen), k = random_tensor({c_out, c_in, 3, 3}, gen),
           b = random_tensor({c_out}, gen);
  const TD y = conv2d(x, k, b, stride);
  REQUIRE(y.shape() == Shape{1, c_out, 4, 3});
  for (std::size_t o = 0; o < c_out; ++o)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = b.data()[o];
        for (std::size_t c = 0; c < c_in; ++c)
          for (std::size_t di = 0; di < 3; ++di)
            for (std::size_t dj = 0; dj < 3; ++dj) {
              const long r = static_cast<long>(i * stride + di) - 1, q = static_cast<long>(j * stride + dj) - 1;
              if (r < 0 || q < 0 || r >= static_cast<long>(h) || q >= static_cast<long>(w)) continue;
              s += k.at({o, c, di, dj}) * x.at({0, c, static_cast<std::size_t>(r), static_cast<std::size_t>(q)});
            }
        CHECK(y.at({0, o, i, j}) == doctest::Approx(s).epsilon(1e-12));
      }
}

TEST_CASE("shape ops") {
  const TD x = TD::from({2, 3}, {0, 1, 2, 3, 4, 5});
  CHECK(transpose(x).at({2, 1}) == 5);
  CHECK(permute(reshape(x, {3, 2}), {1, 0}).at({1, 2}) == 5);
  CHECK(concat<double>({x, x}, 0).shape() == Shape{4, 3});
  CHECK(concat<double>({x, x}, -1).at({1, 4}) == 4);
  CHECK(select(x, 1, 2).at({1}) == 5);
  CHECK(mean(x, 0).at({2}) == 3.5);
  CHECK(mean_all(x).item() == 2.5);
  CHECK_THROWS_AS(reshape(x, {4}), DimensionError);
  CHECK_THROWS_AS(permute(x, {0, 0}), DimensionError);
}

TEST_CASE("finite-difference gradients of every differentiable op") {
  std::mt19937_64 gen(7);
  auto check = [](const char* name, std::vector<TD> inputs, std::function<TD(const std::vector<TD>&)> f) {
    const auto r = grad_check(std::move(inputs), f);
    INFO(name << " checked " << r.checked << " max rel error " << r.max_rel_error);
    CHECK(r.max_rel_error < kTol);
  };
  check("add", {random_tensor({2, 3}, gen), random_tensor({3}, gen)},
        [](const auto& in) { return project(add(in[0], in[1])); });
  check("sub", {random_tensor({2, 3}, gen), random_tensor({2, 3}, gen)},
        [](const auto& in) { return project(sub(in[0], in[1])); });
  check("mul", {random_tensor({4, 2, 3}, gen), random_tensor({2, 3}, gen)},
        [](const auto& in) { return project(mul(in[0], in[1])); });
  check("scale", {random_tensor({5}, gen)}, [](const auto& in) { return project(scale(in[0], 1.7)); });
  check("relu", {TD::from({6}, testing::away_from_zero(6, gen))},
        [](const auto& in) { return project(relu(in[0])); });
  check("prelu", {TD::from({3, 4}, testing::away_from_zero(12, gen)), TD::from({1}, {0.3})},
        [](const auto& in) { return project(prelu(in[0], in[1])); });
  check("matmul", {random_tensor({2, 3, 4}, gen), random_tensor({4, 5}, gen)},
        [](const auto& in) { return project(matmul(in[0], in[1])); });
  check("linear", {random_tensor({2, 3, 4}, gen), random_tensor({4, 2}, gen), random_tensor({2}, gen)},
        [](const auto& in) { return project(linear(in[0], in[1], in[2])); });
  check("reshape/permute/transpose", {random_tensor({2, 3, 4}, gen)}, [](const auto& in) {
    return project(transpose(permute(reshape(in[0], {3, 2, 4}), {2, 0, 1})));
  });
  check("concat", {random_tensor({2, 3}, gen), random_tensor({2, 2}, gen)},
        [](const auto& in) { return project(concat<double>({in[0], in[1]}, 1)); });
  check("select", {random_tensor({3, 4}, gen)}, [](const auto& in) { return project(select(in[0], 0, 1)); });
  check("softmax", {random_tensor({3, 5}, gen, -2, 2)}, [](const auto& in) { return project(softmax(in[0], -1)); });
  const Mask mask = random_mask({2, 4, 4}, gen, true);
  check("masked_softmax", {random_tensor({2, 4, 4}, gen, -2, 2)},
        [&](const auto& in) { return project(masked_softmax(in[0], mask)); });
  check("sparse_aggregate", {random_tensor({2, 4, 4}, gen), random_tensor({2, 4, 3}, gen)},
        [&](const auto& in) { return project(sparse_aggregate(in[0], mask, in[1])); });
  check("sum/mean", {random_tensor({3, 4}, gen)},
        [](const auto& in) { return add(sum(in[0]), mean_all(project(mean(in[0], 1)))); });
  check("l2norm", {random_tensor({3, 4, 2}, gen, 0.2, 1.0)},
        [](const auto& in) { return project(l2norm(in[0], -1)); });
  check("cumsum", {random_tensor({2, 5, 2}, gen)}, [](const auto& in) { return project(cumsum(in[0], 1)); });
  check("conv1d causal dilated", {random_tensor({2, 3, 7}, gen), random_tensor({4, 3, 3}, gen), random_tensor({4}, gen)},
        [](const auto& in) { return project(conv1d(in[0], in[1], in[2], 2, Padding::kCausal)); });
  check("conv1d symmetric", {random_tensor({1, 8, 5}, gen), random_tensor({12, 8, 3}, gen), random_tensor({12}, gen)},
        [](const auto& in) { return project(conv1d(in[0], in[1], in[2], 1, Padding::kSymmetric)); });
  check("conv2d strided", {random_tensor({1, 2, 7, 6}, gen), random_tensor({3, 2, 3, 3}, gen), random_tensor({3}, gen)},
        [](const auto& in) { return project(conv2d(in[0], in[1], in[2], 2)); });
}

TEST_CASE("gradients accumulate additively across consumers") {
  TD x = testing::leaf(TD::from({2}, {1.0, 2.0}));
  const TD y = sum(add(mul(x, x), scale(x, 3.0)));
  backward(y);
  CHECK(x.grad()[0] == doctest::Approx(5.0));
  CHECK(x.grad()[1] == doctest::Approx(7.0));
  backward(sum(x));
  CHECK(x.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("no graph is recorded under NoGradGuard") {
  TD x = testing::leaf(TD::from({2}, {1.0, 2.0}));
  NoGradGuard guard;
  const TD y = sum(mul(x, x));
  CHECK(y.node()->is_leaf());
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("float and double modes agree to float precision") {
  std::mt19937_64 gen(8);
  const TD a = random_tensor({3, 4}, gen), b = random_tensor({4, 2}, gen);
  const Tensor<float> c = matmul(cast<float>(a), cast<float>(b));
  const TD cd = matmul(a, b);
  for (std::size_t i = 0; i < c.numel(); ++i) CHECK(c.data()[i] == doctest::Approx(cd.data()[i]).epsilon(1e-5));
}
