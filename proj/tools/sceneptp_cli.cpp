// scene_ptp: validate | train | eval | ablate | predict

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "sceneptp/commands.hpp"
#include "sceneptp/errors.hpp"

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=\"" << escape(message) << "\"\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sceneptp;
  CLI::App app{"Scene-aware pedestrian trajectory prediction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_file;
  app.add_option("--config", config_file, "key=value config file");

  // Flags mirror RunConfig keys; values are applied after the file and env.
  std::map<std::string, std::optional<std::string>> overrides;
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option(name, overrides[key], help);
  };
  flag("--scene-root", "scene_root", "directory holding one folder per scene");
  flag("--scenes", "scenes", "comma-separated scene names");
  flag("--obs-len", "obs_len", "observed steps");
  flag("--pred-len", "pred_len", "predicted steps");
  flag("--sparsity-k", "sparsity_k", "neighbours kept per adjacency row");
  flag("--d-graph", "d_graph", "graph feature width");
  flag("--d-scene", "d_scene", "scene token width");
  flag("--d-k", "d_k", "attention key width");
  flag("--d-v", "d_v", "attention value width");
  flag("--lr", "lr", "SGD learning rate");
  flag("--epochs", "epochs", "training epochs");
  flag("--grad-clip", "grad_clip", "gradient norm clip (<= 0 disables)");
  flag("--seed", "seed", "random seed");
  flag("--output-dir", "output_dir", "where reports and checkpoints go");
  bool no_semantic = false;
  app.add_flag("--no-semantic", no_semantic, "disable the semantic-map branch");

  auto* validate = app.add_subcommand("validate", "check scene files and report counts");
  auto* train = app.add_subcommand("train", "train on the configured scenes");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint, or run leave-one-out without one");
  auto* ablate = app.add_subcommand("ablate", "leave-one-out with and without semantic maps");
  auto* predict = app.add_subcommand("predict", "predict one window and draw it");

  std::optional<std::string> train_ckpt, eval_ckpt;
  std::string predict_ckpt, scene;
  std::int64_t frame = 0;
  train->add_option("--checkpoint", train_ckpt, "checkpoint path to write");
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate");
  predict->add_option("--checkpoint", predict_ckpt, "checkpoint to load")->required();
  predict->add_option("--scene", scene, "scene name")->required();
  predict->add_option("--frame", frame, "anchor frame id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=usage message=\"" << escape(e.what()) << "\"\n";
    return 2;
  }

  try {
    RunConfig cfg;
    if (config_file) apply_config_file(cfg, *config_file);
    apply_seed_env(cfg);
    for (const auto& [key, value] : overrides)
      if (value) cfg.set(key, *value);
    if (no_semantic) cfg.use_semantic = false;

    if (validate->parsed()) return cmd_validate(cfg, std::cout) == 0 ? 0 : 1;
    if (train->parsed()) cmd_train(cfg, train_ckpt ? std::optional<std::filesystem::path>(*train_ckpt) : std::nullopt, std::cout);
    if (eval->parsed()) cmd_eval(cfg, eval_ckpt ? std::optional<std::filesystem::path>(*eval_ckpt) : std::nullopt, std::cout);
    if (ablate->parsed()) cmd_ablate(cfg, std::cout);
    if (predict->parsed()) cmd_predict(cfg, predict_ckpt, scene, frame, std::cout);
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
