#include "sceneptp/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sceneptp/errors.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
  auto v = text::parse_int(text::trim(value));
  if (!v || *v < 0) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return static_cast<std::size_t>(*v);
}

double parse_real(const std::string& key, const std::string& value) {
  auto v = text::parse_double(text::trim(value));
  if (!v) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return *v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const auto v = text::trim(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  const auto v = text::trim(value);
  std::uint64_t out = 0;
  if (v.empty()) throw ConfigError("bad value for " + key + ": ''");
  for (char c : v) {
    if (c < '0' || c > '9') throw ConfigError("bad value for " + key + ": '" + value + "'");
    const std::uint64_t next = out * 10 + static_cast<std::uint64_t>(c - '0');
    if (next / 10 != out) throw ConfigError("seed out of range: '" + value + "'");
    out = next;
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = {
      "scene_root", "scenes", "obs_len", "pred_len", "use_semantic", "sparsity_k", "d_graph", "d_scene",
      "d_k",        "d_v",    "lr",      "epochs",   "grad_clip",    "seed",       "output_dir"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "scene_root") scene_root = std::string(text::trim(value));
  else if (key == "scenes") scenes = parse_list(value);
  else if (key == "obs_len") obs_len = parse_size(key, value);
  else if (key == "pred_len") pred_len = parse_size(key, value);
  else if (key == "use_semantic") use_semantic = parse_bool(key, value);
  else if (key == "sparsity_k") sparsity_k = parse_size(key, value);
  else if (key == "d_graph") d_graph = parse_size(key, value);
  else if (key == "d_scene") d_scene = parse_size(key, value);
  else if (key == "d_k") d_k = parse_size(key, value);
  else if (key == "d_v") d_v = parse_size(key, value);
  else if (key == "lr") lr = parse_real(key, value);
  else if (key == "epochs") epochs = parse_size(key, value);
  else if (key == "grad_clip") grad_clip = parse_real(key, value);
  else if (key == "seed") seed = parse_seed(key, value);
  else if (key == "output_dir") output_dir = std::string(text::trim(value));
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  if (scenes.empty()) throw ConfigError("scenes must be nonempty");
  std::set<std::string> seen;
  for (const auto& s : scenes)
    if (!seen.insert(s).second) throw ConfigError("scene '" + s + "' listed twice");
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  model_config().validate();
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.obs_len = obs_len;
  m.pred_len = pred_len;
  m.use_semantic = use_semantic;
  m.sparsity_k = sparsity_k;
  m.d_graph = d_graph;
  m.d_scene = d_scene;
  m.d_k = d_k;
  m.d_v = d_v;
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.lr = lr;
  t.epochs = epochs;
  t.grad_clip = grad_clip;
  return t;
}

WindowConfig RunConfig::window_config() const { return {obs_len, pred_len, 1}; }

std::string RunConfig::to_text() const {
  std::ostringstream os;
  std::string names;
  for (std::size_t i = 0; i < scenes.size(); ++i) names += (i ? "," : "") + scenes[i];
  os << "scene_root=" << scene_root.string() << '\n'
     << "scenes=" << names << '\n'
     << "obs_len=" << obs_len << '\n'
     << "pred_len=" << pred_len << '\n'
     << "use_semantic=" << (use_semantic ? "true" : "false") << '\n'
     << "sparsity_k=" << sparsity_k << '\n'
     << "d_graph=" << d_graph << '\n'
     << "d_scene=" << d_scene << '\n'
     << "d_k=" << d_k << '\n'
     << "d_v=" << d_v << '\n'
     << "lr=" << text::format_double(lr) << '\n'
     << "epochs=" << epochs << '\n'
     << "grad_clip=" << text::format_double(grad_clip) << '\n'
     << "seed=" << seed << '\n'
     << "output_dir=" << output_dir.string() << '\n';
  return os.str();
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    try {
      cfg.set(std::string(text::trim(t.substr(0, eq))), std::string(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  apply_config_text(cfg, in);
}

void apply_seed_env(RunConfig& cfg) {
  if (const char* v = std::getenv(kSeedEnv); v && *v) {
    try {
      cfg.seed = parse_seed(kSeedEnv, v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("environment: ") + e.what());
    }
  }
}

}  // namespace sceneptp
