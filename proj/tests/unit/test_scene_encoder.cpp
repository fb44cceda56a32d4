#include <doctest.h>

#include "sceneptp/errors.hpp"
#include "sceneptp/scene_encoder.hpp"
#include "support.hpp"

using namespace sceneptp;
using testing::TD;

namespace {

ModelConfig small_config(bool semantic = true) {
  ModelConfig c;
  c.d_scene = 6;
  c.encoder_channels = {4, 4, 5};
  c.semantic_classes = 3;
  c.use_semantic = semantic;
  return c;
}

SceneAssets assets(std::size_t h, std::size_t w, std::uint64_t seed, bool semantic = true) {
  std::mt19937_64 gen(seed);
  SceneAssets a;
  a.name = "T";
  a.frame = {3, h, w, testing::random_values(3 * h * w, gen, 0.0, 1.0)};
  if (semantic) {
    SemanticGrid g{h / 2, w / 2, 3, std::vector<int>(h * w / 4)};
    for (auto& id : g.ids) id = static_cast<int>(gen() % 3);
    a.semantic = g;
  }
  return a;
}

}  // namespace

TEST_CASE("token grid is ceil(H / 8) by ceil(W / 8)") {
  const auto cfg = small_config();
  ParameterSet<double> params(1);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  CHECK(p.frame.total_stride() == 8);
  for (auto [h, w] : std::vector<std::pair<std::size_t, std::size_t>>{{32, 32}, {48, 40}, {36, 64}}) {
    const TD tokens = encode_scene(p, assets(h, w, h + w));
    CHECK(tokens.shape() == Shape{((h + 7) / 8) * ((w + 7) / 8), 6});
  }
}

TEST_CASE("rasters below the minimum extent are rejected") {
  const auto cfg = small_config();
  ParameterSet<double> params(2);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  CHECK_THROWS_AS(encode_scene(p, assets(16, 40, 3)), ConfigError);
  CHECK_THROWS_AS(encode_scene(p, assets(40, 30, 3)), ConfigError);
}

TEST_CASE("asset mismatches are config errors") {
  const auto cfg = small_config();
  ParameterSet<double> params(3);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  CHECK_THROWS_AS(encode_scene(p, assets(32, 32, 4, false)), ConfigError);
  auto a = assets(32, 32, 4);
  a.semantic->class_count = 5;
  CHECK_THROWS_AS(encode_scene(p, a), ConfigError);
  a = assets(32, 32, 4);
  a.frame.channels = 1;
  a.frame.values.resize(32 * 32);
  CHECK_THROWS_AS(encode_scene(p, a), ConfigError);
}

TEST_CASE("without semantic maps only the frame branch is used") {
  const auto cfg = small_config(false);
  ParameterSet<double> params(4);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  CHECK(p.semantic.layers.empty());
  CHECK(!params.contains("scene.semantic.conv0.weight"));
  CHECK(p.mlp_weight1.dim(0) == 5);
  auto with = assets(32, 32, 5);
  auto without = with;
  without.semantic.reset();
  const TD a = encode_scene(p, with), b = encode_scene(p, without);
  CHECK(a.shape() == Shape{16, 6});
  for (std::size_t i = 0; i < a.numel(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("semantic grid changes the tokens when enabled") {
  const auto cfg = small_config();
  ParameterSet<double> params(5);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  CHECK(p.mlp_weight1.dim(0) == 10);
  auto a = assets(32, 32, 6), b = a;
  for (auto& id : b.semantic->ids) id = (id + 1) % 3;
  const TD ta = encode_scene(p, a), tb = encode_scene(p, b);
  double diff = 0;
  for (std::size_t i = 0; i < ta.numel(); ++i) diff += std::fabs(ta.data()[i] - tb.data()[i]);
  CHECK(diff > 0);
}

TEST_CASE("conv stack output is a strided conv oracle on a 1-layer stack") {
  ParameterSet<double> params(6);
  const auto stack = ConvStack<double>::create(params, "t", 1, {1});
  const TD x = TD::from({1, 4, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
  const TD y = conv_stack_forward(stack, x);
  REQUIRE(y.shape() == Shape{1, 2, 2});
  const auto w = stack.layers[0].weight.data();
  // Zero padding of 1, stride 2, zero bias, PReLU slope 0.25.
  for (std::size_t oy = 0; oy < 2; ++oy)
    for (std::size_t ox = 0; ox < 2; ++ox) {
      double s = 0;
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          const int iy = static_cast<int>(oy * 2) + ky - 1, ix = static_cast<int>(ox * 2) + kx - 1;
          if (iy >= 0 && iy < 4 && ix >= 0 && ix < 4) s += w[ky * 3 + kx] * x.data()[iy * 4 + ix];
        }
      const double expect = s > 0 ? s : 0.25 * s;
      CHECK(y.data()[oy * 2 + ox] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("scene encoder gradients match finite differences") {
  ModelConfig cfg = small_config();
  cfg.encoder_channels = {2, 2, 3};
  cfg.d_scene = 3;
  ParameterSet<double> params(7);
  const auto p = SceneEncoderParams<double>::create(params, cfg);
  const auto a = assets(32, 32, 9);
  const auto detached = [](const TD& t) { return TD::from(t.shape(), std::vector<double>(t.data().begin(), t.data().end())); };
  const TD frame = detached(encode_frame(p.frame, a.frame));
  const TD sem = detached(encode_semantic(p.semantic, *a.semantic, 32, 32));
  const auto r = testing::grad_check({frame, sem, p.mlp_weight1, p.mlp_weight2}, [&](const std::vector<TD>& in) {
    auto q = p;
    q.mlp_weight1 = in[2];
    q.mlp_weight2 = in[3];
    return testing::project(fuse_scene(q, in[0], in[1]));
  });
  CHECK(r.max_rel_error < 1e-4);
  const auto r2 = testing::grad_check({p.frame.layers[2].weight, p.frame.layers[0].bias}, [&](const std::vector<TD>& in) {
    auto s = p.frame;
    s.layers[2].weight = in[0];
    s.layers[0].bias = in[1];
    return testing::project(encode_frame(s, a.frame));
  });
  CHECK(r2.max_rel_error < 1e-4);
}
