#include "sceneptp/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "sceneptp/checkpoint.hpp"
#include "sceneptp/errors.hpp"
#include "sceneptp/svg.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

using Model = TrajectoryModel<float>;

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
}

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

// Windows follow the horizon the checkpoint was trained with.
WindowConfig windows_for(const ModelConfig& m) { return {m.obs_len, m.pred_len, 1}; }

}  // namespace

std::size_t cmd_validate(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  std::size_t failures = 0;
  for (const auto& scene : cfg.scenes) {
    Corpus corpus;
    try {
      load_scene(corpus, cfg.scene_root, scene, cfg.window_config(), cfg.use_semantic);
      const auto& windows = corpus.windows_of(scene);
      if (windows.empty()) throw IntegrityError("no complete " + std::to_string(cfg.obs_len + cfg.pred_len) +
                                                "-frame window");
      std::size_t peds = 0;
      for (const auto& w : windows) peds += w.num_peds();
      const auto& a = corpus.assets.at(scene);
      out << "scene=" << scene << " status=ok records=" << corpus.records.at(scene).size()
          << " windows=" << windows.size() << " trajectories=" << peds << " raster=" << a.frame.channels << 'x'
          << a.frame.height << 'x' << a.frame.width;
      if (a.semantic) out << " semantic=" << a.semantic->height << 'x' << a.semantic->width;
      out << '\n';
    } catch (const Error& e) {
      ++failures;
      out << "scene=" << scene << " status=error kind=" << e.kind() << " message=" << quoted(e.what()) << '\n';
    }
  }
  out << "errors=" << failures << '\n';
  return failures;
}

TrainOutputs cmd_train(const RunConfig& cfg, const std::optional<std::filesystem::path>& checkpoint,
                       std::ostream& out) {
  cfg.validate();
  const Corpus corpus = load_corpus(cfg.scene_root, cfg.scenes, cfg.window_config(), cfg.use_semantic);
  const auto windows = corpus.gather(cfg.scenes);
  Model model(cfg.model_config(), cfg.seed);
  const TrainingLog log = train(model, windows, corpus.assets, cfg.train_config());

  ensure_output_dir(cfg);
  TrainOutputs paths{checkpoint.value_or(cfg.output_dir / "model.ckpt"), cfg.output_dir / "loss_curve.csv"};
  save_checkpoint(paths.checkpoint, model);
  std::ostringstream csv;
  csv << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
    csv << e + 1 << ',' << text::format_double(log.epoch_loss[e]) << '\n';
  write_text(paths.loss_curve, csv.str());
  out << "trained windows=" << windows.size() << " steps=" << log.steps << " final_loss="
      << text::format_double(log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()) << '\n'
      << "checkpoint=" << paths.checkpoint.string() << '\n'
      << "loss_curve=" << paths.loss_curve.string() << '\n';
  return paths;
}

std::filesystem::path cmd_eval(const RunConfig& cfg, const std::optional<std::filesystem::path>& checkpoint,
                               std::ostream& out) {
  cfg.validate();
  ExperimentReport report;
  if (checkpoint) {
    const Model model = load_checkpoint<float>(*checkpoint);
    const ModelConfig& mc = model.config();
    const Corpus corpus = load_corpus(cfg.scene_root, cfg.scenes, windows_for(mc), mc.use_semantic);
    std::vector<MetricsReport> rows;
    for (const auto& scene : cfg.scenes) rows.push_back(evaluate(model, corpus.windows_of(scene), corpus.assets, scene));
    report = ExperimentReport::from_scenes("checkpoint", std::move(rows));
  } else {
    const Corpus corpus = load_corpus(cfg.scene_root, cfg.scenes, cfg.window_config(), cfg.use_semantic);
    report = run_leave_one_out<float>(cfg.model_config(), cfg.train_config(), corpus, cfg.seed,
                                      cfg.use_semantic ? "w/ Maps" : "w/o Maps");
  }
  std::ostringstream csv;
  report.write_csv(csv);
  ensure_output_dir(cfg);
  const auto path = cfg.output_dir / "report.csv";
  write_text(path, csv.str());
  out << csv.str();
  return path;
}

std::filesystem::path cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  // The semantic grids are needed for the w/ Maps half regardless of use_semantic.
  const Corpus corpus = load_corpus(cfg.scene_root, cfg.scenes, cfg.window_config(), true);
  const AblationReport report = run_ablation<float>(cfg.model_config(), cfg.train_config(), corpus, cfg.seed);
  std::ostringstream csv;
  report.write_csv(csv);
  ensure_output_dir(cfg);
  const auto path = cfg.output_dir / "ablation.csv";
  write_text(path, csv.str());
  out << csv.str();
  return path;
}

PredictOutputs cmd_predict(const RunConfig& cfg, const std::filesystem::path& checkpoint, const std::string& scene,
                           std::int64_t frame, std::ostream& out) {
  const Model model = load_checkpoint<float>(checkpoint);
  const ModelConfig& mc = model.config();
  Corpus corpus;
  load_scene(corpus, cfg.scene_root, scene, windows_for(mc), mc.use_semantic);
  const auto& windows = corpus.windows_of(scene);
  const TrajectoryWindow* found = nullptr;
  for (const auto& w : windows)
    if (w.anchor_frame == frame) found = &w;
  if (!found) throw ConfigError("scene " + scene + " has no complete window anchored at frame " + std::to_string(frame));

  const std::vector<TrajectoryWindow> one{*found};
  const Tensor<float> pred = predict_windows(model, one, corpus.assets).front();
  const auto values = pred.data();

  std::ostringstream csv;
  csv << "ped_id,step,x,y\n";
  const std::size_t tp = found->pred_len;
  for (std::size_t i = 0; i < found->num_peds(); ++i)
    for (std::size_t t = 0; t < tp; ++t)
      csv << found->ped_ids[i] << ',' << t + 1 << ',' << text::format_float(values[(i * tp + t) * 2]) << ','
          << text::format_float(values[(i * tp + t) * 2 + 1]) << '\n';

  const std::vector<double> as_double(values.begin(), values.end());
  const std::string svg = render_svg(*found, as_double, annotation_extent(corpus.records.at(scene)),
                                     &corpus.assets.at(scene).frame);
  ensure_output_dir(cfg);
  const std::string stem = "predict_" + scene + "_" + std::to_string(frame);
  PredictOutputs paths{cfg.output_dir / (stem + ".csv"), cfg.output_dir / (stem + ".svg")};
  write_text(paths.csv, csv.str());
  write_text(paths.svg, svg);
  out << "pedestrians=" << found->num_peds() << " steps=" << tp << '\n'
      << "csv=" << paths.csv.string() << '\n'
      << "svg=" << paths.svg.string() << '\n';
  return paths;
}

}  // namespace sceneptp
