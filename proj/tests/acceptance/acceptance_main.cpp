// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if a criterion fails that was not named with --known-failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "sceneptp/checkpoint.hpp"
#include "sceneptp/commands.hpp"
#include "sceneptp/errors.hpp"
#include "sceneptp/metrics.hpp"
#include "sceneptp/run_config.hpp"
#include "sceneptp/synthetic.hpp"
#include "sceneptp/text.hpp"
#include "sceneptp/training.hpp"
#include "support.hpp"

using namespace sceneptp;
using testing::TD;
using testing::grad_check;
using testing::project;
using testing::random_tensor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) { return text::format_double(v); }

Mask random_mask(const Shape& shape, std::mt19937_64& gen) {
  Mask m{shape, std::vector<std::uint8_t>(shape_numel(shape))};
  std::bernoulli_distribution keep(0.6);
  const std::size_t c = shape.back(), r = shape[shape.size() - 2];
  for (std::size_t i = 0; i < m.keep.size(); ++i) m.keep[i] = keep(gen) || (i / c) % r == i % c;
  return m;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.d_graph = c.d_scene = c.d_k = c.d_v = 6;
  c.encoder_channels = {2, 2, 3};
  c.sparsity_k = 2;
  return c;
}

SceneAssets random_assets(std::size_t h, std::size_t w, std::size_t classes, std::mt19937_64& gen) {
  SceneAssets a;
  a.name = "R";
  a.frame = {3, h, w, testing::random_values(3 * h * w, gen, 0.0, 1.0)};
  SemanticGrid g{h, w, classes, std::vector<int>(h * w)};
  for (auto& id : g.ids) id = static_cast<int>(gen() % classes);
  a.semantic = g;
  return a;
}

TD detached(const TD& t) { return TD::from(t.shape(), std::vector<double>(t.data().begin(), t.data().end())); }

Outcome gradient_suite() {
  const auto start = Clock::now();
  Outcome o;
  double worst = 0.0;
  std::size_t checked = 0;
  std::mt19937_64 gen(101);
  auto check = [&](const std::string& name, std::vector<TD> inputs, const std::function<TD(const std::vector<TD>&)>& f) {
    const auto r = grad_check(std::move(inputs), f);
    worst = std::max(worst, r.max_rel_error);
    checked += r.checked;
    o.require(r.max_rel_error < 1e-4, name + " rel error " + num(r.max_rel_error));
  };

  check("add", {random_tensor({2, 3}, gen), random_tensor({3}, gen)}, [](const auto& in) { return project(add(in[0], in[1])); });
  check("sub", {random_tensor({2, 3}, gen), random_tensor({2, 3}, gen)}, [](const auto& in) { return project(sub(in[0], in[1])); });
  check("mul", {random_tensor({4, 2, 3}, gen), random_tensor({2, 3}, gen)}, [](const auto& in) { return project(mul(in[0], in[1])); });
  check("scale", {random_tensor({5}, gen)}, [](const auto& in) { return project(scale(in[0], 1.7)); });
  check("relu", {TD::from({6}, testing::away_from_zero(6, gen))}, [](const auto& in) { return project(relu(in[0])); });
  check("prelu", {TD::from({3, 4}, testing::away_from_zero(12, gen)), TD::from({1}, {0.3})},
        [](const auto& in) { return project(prelu(in[0], in[1])); });
  check("matmul", {random_tensor({2, 3, 4}, gen), random_tensor({4, 5}, gen)}, [](const auto& in) { return project(matmul(in[0], in[1])); });
  check("linear", {random_tensor({2, 3, 4}, gen), random_tensor({4, 2}, gen), random_tensor({2}, gen)},
        [](const auto& in) { return project(linear(in[0], in[1], in[2])); });
  check("shape ops", {random_tensor({2, 3, 4}, gen)},
        [](const auto& in) { return project(transpose(permute(reshape(in[0], {3, 2, 4}), {2, 0, 1}))); });
  check("concat", {random_tensor({2, 3}, gen), random_tensor({2, 2}, gen)},
        [](const auto& in) { return project(concat<double>({in[0], in[1]}, 1)); });
  check("select", {random_tensor({3, 4}, gen)}, [](const auto& in) { return project(select(in[0], 0, 1)); });
  check("softmax", {random_tensor({3, 5}, gen, -2, 2)}, [](const auto& in) { return project(softmax(in[0], -1)); });
  const Mask mask = random_mask({2, 4, 4}, gen);
  check("masked_softmax", {random_tensor({2, 4, 4}, gen, -2, 2)}, [&](const auto& in) { return project(masked_softmax(in[0], mask)); });
  check("sparse_aggregate", {random_tensor({2, 4, 4}, gen), random_tensor({2, 4, 3}, gen)},
        [&](const auto& in) { return project(sparse_aggregate(in[0], mask, in[1])); });
  check("sum/mean", {random_tensor({3, 4}, gen)}, [](const auto& in) { return add(sum(in[0]), mean_all(project(mean(in[0], 1)))); });
  check("l2norm", {random_tensor({3, 4, 2}, gen, 0.2, 1.0)}, [](const auto& in) { return project(l2norm(in[0], -1)); });
  check("cumsum", {random_tensor({2, 5, 2}, gen)}, [](const auto& in) { return project(cumsum(in[0], 1)); });
  check("conv1d causal", {random_tensor({2, 3, 7}, gen), random_tensor({4, 3, 3}, gen), random_tensor({4}, gen)},
        [](const auto& in) { return project(conv1d(in[0], in[1], in[2], 2, Padding::kCausal)); });
  check("conv1d symmetric", {random_tensor({1, 8, 5}, gen), random_tensor({12, 8, 3}, gen), random_tensor({12}, gen)},
        [](const auto& in) { return project(conv1d(in[0], in[1], in[2], 1, Padding::kSymmetric)); });
  check("conv2d", {random_tensor({1, 2, 7, 6}, gen), random_tensor({3, 2, 3, 3}, gen), random_tensor({3}, gen)},
        [](const auto& in) { return project(conv2d(in[0], in[1], in[2], 2)); });

  const ModelConfig cfg = tiny_config();
  ParameterSet<double> params(7);
  const auto inter = InteractionParams<double>::create(params, cfg);
  const auto scene = SceneEncoderParams<double>::create(params, cfg);
  const auto fusion = FusionParams<double>::create(params, cfg);
  const auto decoder = DecoderParams<double>::create(params, cfg);

  const TD bias = TD::from({6}, testing::away_from_zero(6, gen, 0.2));
  check("interaction_forward",
        {TD::from({3, 8, 2}, testing::away_from_zero(48, gen, 0.2)), inter.spatial_key, inter.temporal_query,
         inter.spatial_layers[0].weight, inter.fuse_weight, bias},
        [&](const std::vector<TD>& in) {
          auto p = inter;
          p.spatial_key = in[1];
          p.temporal_query = in[2];
          p.spatial_layers[0].weight = in[3];
          p.fuse_weight = in[4];
          p.embed_bias = in[5];
          return project(interaction_forward(p, in[0]).values);
        });

  const auto assets = random_assets(32, 32, cfg.semantic_classes, gen);
  const TD frame = detached(encode_frame(scene.frame, assets.frame));
  const TD sem = detached(encode_semantic(scene.semantic, *assets.semantic, 32, 32));
  check("scene fuse", {frame, sem, scene.mlp_weight1, scene.mlp_bias1, scene.mlp_weight2},
        [&](const std::vector<TD>& in) {
          auto p = scene;
          p.mlp_weight1 = in[2];
          p.mlp_bias1 = in[3];
          p.mlp_weight2 = in[4];
          return project(fuse_scene(p, in[0], in[1]));
        });
  check("scene conv stack", {scene.frame.layers[1].weight, scene.frame.layers[2].bias}, [&](const std::vector<TD>& in) {
    auto s = scene.frame;
    s.layers[1].weight = in[0];
    s.layers[2].bias = in[1];
    return project(encode_frame(s, assets.frame));
  });

  check("cross_attention",
        {random_tensor({3, 8, 6}, gen), random_tensor({16, 6}, gen), fusion.w_query, fusion.w_key, fusion.w_value,
         fusion.w_output},
        [&](const std::vector<TD>& in) {
          const FusionParams<double> p{in[2], in[3], in[4], in[5]};
          return project(residual_fuse(cross_attention(in[0], in[1], p).values, in[0]));
        });

  check("tcn_decode", {random_tensor({3, 8, 6}, gen), decoder.blocks[0].weight, decoder.expand_weight, decoder.head_weight},
        [&](const std::vector<TD>& in) {
          auto p = decoder;
          p.blocks[0].weight = in[1];
          p.expand_weight = in[2];
          p.head_weight = in[3];
          return project(tcn_decode(p, in[0]));
        });

  const TD truth = random_tensor({3, 12, 2}, gen);
  check("loss", {random_tensor({3, 12, 2}, gen)}, [&](const std::vector<TD>& in) { return composite_loss(in[0], truth); });

  const double elapsed = seconds_since(start);
  o.require(elapsed < 60.0, "runtime " + num(elapsed) + " s");
  o.detail = "max rel error " + num(worst) + " over " + std::to_string(checked) + " elements, " + num(elapsed) + " s" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome metric_oracle() {
  Outcome o;
  std::mt19937_64 gen(202);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + gen() % 8, steps = 1 + gen() % 12;
    const TD p = random_tensor({n, steps, 2}, gen, -10, 10), t = random_tensor({n, steps, 2}, gen, -10, 10);
    double all = 0.0, fin = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t k = (i * steps + s) * 2;
        const double dx = p.data()[k] - t.data()[k], dy = p.data()[k + 1] - t.data()[k + 1];
        const double d = std::sqrt(dx * dx + dy * dy);
        all += d;
        if (s + 1 == steps) fin += d;
      }
    worst = std::max(worst, std::fabs(ade(p, t).item() - all / static_cast<double>(n * steps)));
    worst = std::max(worst, std::fabs(fde(p, t).item() - fin / static_cast<double>(n)));
  }
  o.require(worst < 1e-9, "oracle deviation " + num(worst));
  const TD p = TD::from({1, 1, 2}, {3.0, 4.0}), t = TD::zeros({1, 1, 2});
  const double a = ade(p, t).item(), f = fde(p, t).item();
  o.require(a == 5.0 && f == 5.0, "3-4-5 case gave " + num(a) + "/" + num(f));
  o.detail = "max deviation " + num(worst) + " over 100 cases, 3-4-5 -> " + num(a) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome attention_invariants() {
  Outcome o;
  const ModelConfig cfg;
  ParameterSet<double> params(303);
  const auto fusion = FusionParams<double>::create(params, cfg);
  std::mt19937_64 gen(303);
  const std::size_t s = 20;
  const TD graph = random_tensor({5, 8, cfg.d_graph}, gen);
  const TD tokens = random_tensor({s, cfg.d_scene}, gen);
  const auto out = cross_attention(graph, tokens, fusion);

  double row_err = 0.0;
  for (std::size_t r = 0; r < out.weights.numel() / s; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) sum += out.weights.data()[r * s + j];
    row_err = std::max(row_err, std::fabs(sum - 1.0));
  }
  o.require(row_err < 1e-6, "row sum error " + num(row_err));

  std::vector<std::size_t> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<double> shuffled(tokens.numel());
  for (std::size_t i = 0; i < s; ++i)
    std::copy_n(tokens.data().begin() + static_cast<long>(perm[i] * cfg.d_scene), cfg.d_scene,
                shuffled.begin() + static_cast<long>(i * cfg.d_scene));
  const auto moved = cross_attention(graph, TD::from(tokens.shape(), shuffled), fusion);
  double perm_err = 0.0;
  for (std::size_t i = 0; i < out.values.numel(); ++i)
    perm_err = std::max(perm_err, std::fabs(out.values.data()[i] - moved.values.data()[i]));
  o.require(perm_err < 1e-6, "token permutation error " + num(perm_err));

  auto zero_v = fusion;
  zero_v.w_value = TD::zeros(fusion.w_value.shape());
  const TD fused = residual_fuse(cross_attention(graph, tokens, zero_v).values, graph);
  const bool exact = std::memcmp(fused.data().data(), graph.data().data(), graph.data().size_bytes()) == 0;
  o.require(exact, "V=0 residual not exact");
  o.detail = "row sum error " + num(row_err) + ", permutation error " + num(perm_err) +
             ", V=0 exact=" + (exact ? "yes" : "no") + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome graph_invariants() {
  Outcome o;
  const ModelConfig cfg;
  ParameterSet<double> params(404);
  const auto p = InteractionParams<double>::create(params, cfg);
  std::mt19937_64 gen(404);
  const std::size_t n = 7, t_obs = cfg.obs_len;
  const TD disp = random_tensor({n, t_obs, 2}, gen, -0.5, 0.5);
  const auto out = interaction_forward(p, disp);

  double stoch_err = 0.0;
  std::size_t max_nz = 0;
  bool causal_support = true;
  for (const auto* adj : {&out.graphs.spatial, &out.graphs.temporal}) {
    const std::size_t len = adj->weights.dim(2);
    for (std::size_t r = 0; r < adj->weights.numel() / len; ++r) {
      double sum = 0.0;
      std::size_t nz = 0;
      for (std::size_t c = 0; c < len; ++c) {
        sum += adj->weights.data()[r * len + c];
        nz += adj->weights.data()[r * len + c] != 0.0;
        if (adj == &out.graphs.temporal && c > r % len && adj->support.keep[r * len + c]) causal_support = false;
      }
      stoch_err = std::max(stoch_err, std::fabs(sum - 1.0));
      max_nz = std::max(max_nz, nz);
    }
  }
  o.require(stoch_err < 1e-5, "row-stochastic error " + num(stoch_err));
  o.require(max_nz <= cfg.sparsity_k + 1, "row with " + std::to_string(max_nz) + " nonzeros");
  o.require(causal_support, "temporal adjacency links to a future step");

  bool causal = true;
  for (std::size_t cut = 1; cut < t_obs; ++cut) {
    std::vector<double> v(disp.data().begin(), disp.data().end());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = cut; t < t_obs; ++t) v[(i * t_obs + t) * 2] += 0.25 + 0.01 * static_cast<double>(t);
    const auto changed = interaction_forward(p, TD::from(disp.shape(), v));
    const std::size_t d = cfg.d_graph;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < cut; ++t)
        causal &= std::memcmp(&out.values.data()[(i * t_obs + t) * d], &changed.values.data()[(i * t_obs + t) * d],
                              d * sizeof(double)) == 0;
  }
  o.require(causal, "earlier features changed when future steps were perturbed");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  const auto permute_rows = [&](const TD& x) {
    const std::size_t row = x.numel() / n;
    std::vector<double> v(x.numel());
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(x.data().begin() + static_cast<long>(perm[i] * row), row, v.begin() + static_cast<long>(i * row));
    return TD::from(x.shape(), v);
  };
  const TD expected = permute_rows(out.values);
  const TD moved = interaction_forward(p, permute_rows(disp)).values;
  const bool equivariant = std::memcmp(expected.data().data(), moved.data().data(), expected.data().size_bytes()) == 0;
  o.require(equivariant, "pedestrian permutation not exactly equivariant");
  o.detail = "row-stochastic error " + num(stoch_err) + ", max nonzeros " + std::to_string(max_nz) + " (k=" +
             std::to_string(cfg.sparsity_k) + "), causal=" + (causal && causal_support ? "yes" : "no") +
             ", exact equivariance=" + (equivariant ? "yes" : "no") + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome overfit_gate() {
  const auto start = Clock::now();
  Outcome o;
  const Corpus corpus = make_corpus({crossing_scene()});
  const auto& windows = corpus.windows_of("SYNTH");
  TrajectoryModel<float> model(ModelConfig{}, 42);
  TrainConfig tc;
  tc.lr = 0.1;
  tc.grad_clip = 2.0;
  tc.final_lr_scale = 0.003;
  tc.max_steps = 500;
  tc.epochs = (tc.max_steps + windows.size() - 1) / windows.size();
  const double initial = mean_loss(model, windows, corpus.assets);
  const auto log = train(model, windows, corpus.assets, tc);
  const double loss = mean_loss(model, windows, corpus.assets);
  const double elapsed = seconds_since(start);
  o.require(windows.size() == 8, std::to_string(windows.size()) + " windows");
  o.require(log.steps == 500, std::to_string(log.steps) + " steps");
  o.require(loss < 0.05, "final loss " + num(loss) + " m is not below 0.05 m");
  o.require(elapsed < 300.0, "runtime " + num(elapsed) + " s");
  o.detail = "mean loss " + num(initial) + " m untrained, " + num(loss) + " m after " + std::to_string(log.steps) +
             " steps, " + num(elapsed) + " s" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

std::vector<std::string> csv_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig small_run(const std::filesystem::path& root, const std::filesystem::path& out) {
  RunConfig cfg;
  cfg.scene_root = root;
  cfg.output_dir = out;
  cfg.d_graph = cfg.d_scene = cfg.d_k = cfg.d_v = 16;
  cfg.epochs = 2;
  cfg.seed = 11;
  return cfg;
}

Outcome protocol_conformance() {
  Outcome o;
  std::vector<SyntheticScene> scenes;
  for (const auto& name : default_scenes()) scenes.push_back(toy_scene(name, 1));
  const Corpus corpus = make_corpus(scenes);
  ModelConfig mc;
  mc.d_graph = mc.d_scene = mc.d_k = mc.d_v = 16;
  TrainConfig tc;
  tc.epochs = 2;
  const auto report = run_leave_one_out<float>(mc, tc, corpus, 5, "w/ Maps");
  std::ostringstream csv;
  report.write_csv(csv);
  const auto lines = csv_lines(csv.str());
  o.require(lines.size() == 6 && lines[0] == "scene,ade_m,fde_m,n_windows", "unexpected report layout");
  o.require(report.scenes.size() == 4, std::to_string(report.scenes.size()) + " scene rows");
  for (std::size_t i = 0; i < report.scenes.size() && i < 4; ++i)
    o.require(report.scenes[i].scene == default_scenes()[i] && lines[i + 1].rfind(default_scenes()[i] + ",", 0) == 0,
              "row " + std::to_string(i) + " is " + report.scenes[i].scene);
  double ade_sum = 0.0, fde_sum = 0.0;
  for (const auto& s : report.scenes) {
    ade_sum += s.ade;
    fde_sum += s.fde;
  }
  const double dev = std::max(std::fabs(report.average.ade - ade_sum / 4.0), std::fabs(report.average.fde - fde_sum / 4.0));
  o.require(lines.size() == 6 && lines[5].rfind("AVG,", 0) == 0, "missing AVG row");
  o.require(dev < 1e-12, "AVG deviates from scene means by " + num(dev));

  testing::TempDir dir("acceptance_protocol");
  write_toy_corpus(dir.path / "data", 1);
  std::ostringstream sink;
  const auto path = cmd_ablate(small_run(dir.path / "data", dir.path / "out"), sink);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  const auto ab = csv_lines(text.str());
  std::size_t with = ab.size(), without = ab.size();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == "# configuration: w/ Maps") with = i;
    if (ab[i] == "# configuration: w/o Maps") without = i;
  }
  const bool paired = with < without && without < ab.size() && without - with == 7 && ab.size() - without >= 7 &&
                      ab[with + 1] == "scene,ade_m,fde_m,n_windows" && ab[without + 1] == ab[with + 1] &&
                      ab[with + 6].rfind("AVG,", 0) == 0 && ab[without + 6].rfind("AVG,", 0) == 0;
  o.require(paired, "ablation output is not a paired w/ Maps / w/o Maps table");
  o.detail = "4 scene rows + AVG, AVG deviation " + num(dev) + ", ablation blocks paired=" + (paired ? "yes" : "no") +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome ablation_isolation() {
  Outcome o;
  std::vector<SyntheticScene> scenes{toy_scene("ETH", 2), toy_scene("HOTEL", 2)};
  std::vector<SyntheticScene> perturbed = scenes;
  std::mt19937_64 gen(707);
  for (auto& s : perturbed) {
    for (auto& id : s.assets.semantic->ids) id = static_cast<int>(gen() % s.assets.semantic->class_count);
  }
  // Structurally different grid too: a different resolution.
  perturbed[1].assets.semantic = SemanticGrid{8, 8, 8, std::vector<int>(64, 3)};
  ModelConfig mc;
  mc.use_semantic = false;
  mc.d_graph = mc.d_scene = mc.d_k = mc.d_v = 16;
  TrainConfig tc;
  tc.epochs = 2;

  const auto run = [&](const std::vector<SyntheticScene>& set) {
    const Corpus corpus = make_corpus(set);
    TrajectoryModel<float> model(mc, 99);
    const auto windows = corpus.gather({"ETH"});
    train(model, windows, corpus.assets, tc);
    std::vector<float> flat;
    for (const auto& name : {"ETH", "HOTEL"})
      for (const auto& pred : predict_windows(model, corpus.windows_of(name), corpus.assets))
        flat.insert(flat.end(), pred.data().begin(), pred.data().end());
    return flat;
  };
  const auto a = run(scenes), b = run(perturbed);
  const bool identical = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
  o.require(identical, "predictions differ after perturbing semantic grids");
  o.detail = std::to_string(a.size() / 2) + " predicted points bit-identical=" + (identical ? "yes" : "no");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_round_trips() {
  Outcome o;
  testing::TempDir dir("acceptance_determinism");
  write_toy_corpus(dir.path / "data", 4);
  std::vector<std::string> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    const auto out = dir.path / ("run" + std::to_string(rep));
    const RunConfig cfg = small_run(dir.path / "data", out);
    std::ostringstream sink;
    const auto trained = cmd_train(cfg, std::nullopt, sink);
    cmd_eval(cfg, trained.checkpoint, sink);
    const auto pred = cmd_predict(cfg, trained.checkpoint, "ETH", 0, sink);
    outputs.push_back(slurp(trained.loss_curve) + slurp(out / "report.csv") + slurp(pred.csv) + slurp(pred.svg));
  }
  const bool same_csv = outputs[0] == outputs[1];
  o.require(same_csv, "CSV outputs differ between runs");

  const Corpus corpus = make_corpus({toy_scene("ZARA1", 5)});
  const auto& windows = corpus.windows_of("ZARA1");
  TrajectoryModel<float> model(ModelConfig{}, 8);
  TrainConfig tc;
  tc.epochs = 1;
  train(model, windows, corpus.assets, tc);
  const auto before = evaluate(model, windows, corpus.assets, "ZARA1");
  std::stringstream ckpt;
  save_checkpoint(ckpt, model);
  const auto loaded = load_checkpoint<float>(ckpt);
  const auto after = evaluate(loaded, windows, corpus.assets, "ZARA1");
  const bool same_metrics = std::memcmp(&before.ade, &after.ade, sizeof(double)) == 0 &&
                            std::memcmp(&before.fde, &after.fde, sizeof(double)) == 0;
  o.require(same_metrics, "metrics changed after checkpoint round-trip");

  std::mt19937_64 gen(808);
  bool parsers = true;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AnnotationRecord> recs;
    std::uniform_real_distribution<double> coord(-100, 100);
    for (std::int64_t f = 0; f < 15; ++f)
      for (std::int64_t p = 1; p <= 4; ++p)
        if (gen() % 4) recs.push_back({f * 10, p, coord(gen) * std::pow(10.0, static_cast<int>(gen() % 7) - 3), coord(gen)});
    std::stringstream a;
    write_annotations(a, recs);
    parsers &= parse_annotations(a) == recs;

    const std::size_t h = 1 + gen() % 9, w = 1 + gen() % 9, classes = 1 + gen() % 12;
    SemanticGrid g{h, w, classes, std::vector<int>(h * w)};
    for (auto& id : g.ids) id = static_cast<int>(gen() % classes);
    std::stringstream s;
    write_semantic_grid(s, g);
    parsers &= load_semantic_grid(s) == g;

    FrameRaster r{1 + gen() % 4, h, w, {}};
    r.values = testing::random_values(r.channels * h * w, gen, 0.0, 1.0);
    std::stringstream fr;
    write_frame_raster(fr, r);
    parsers &= load_frame_raster(fr) == r;
  }
  o.require(parsers, "a parser did not reproduce its serializer's input");
  o.detail = std::string("CSVs byte-identical=") + (same_csv ? "yes" : "no") +
             ", checkpoint metrics bitwise=" + (same_metrics ? "yes" : "no") + ", parser round-trips=" +
             (parsers ? "yes" : "no") + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance checks");
  std::vector<int> known_failures;
  std::vector<int> only;
  std::string report_path;
  app.add_option("--known-failure", known_failures, "Criterion whose FAIL does not fail the run")->check(CLI::Range(1, 8));
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 8));
  app.add_option("--report", report_path, "Also write the PASS/FAIL lines to this file");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient suite", gradient_suite},
      {"metric oracle", metric_oracle},
      {"attention invariants", attention_invariants},
      {"sparse-graph invariants", graph_invariants},
      {"overfit gate", overfit_gate},
      {"protocol conformance", protocol_conformance},
      {"ablation isolation", ablation_isolation},
      {"determinism and round-trips", determinism_round_trips},
  };
  const std::set<int> known(known_failures.begin(), known_failures.end());
  const std::set<int> selected(only.begin(), only.end());
  std::ostringstream lines;
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::string line = "criterion " + std::to_string(id) + " (" + criteria[i].first + "): " + (o.pass ? "PASS" : "FAIL") +
                       " - " + o.detail;
    if (!o.pass && known.count(id)) line += " [known failure]";
    if (!o.pass && !known.count(id)) ++unexpected;
    std::cout << line << std::endl;
    lines << line << '\n';
  }
  if (!report_path.empty()) std::ofstream(report_path) << lines.str();
  return unexpected == 0 ? 0 : 1;
}
