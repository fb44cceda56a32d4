#include "sceneptp/model_config.hpp"

#include <map>
#include <sstream>

#include "sceneptp/errors.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> split_sizes(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = text::parse_int(text::trim(item));
    if (!v || *v < 1) throw ConfigError("bad list value for " + key + ": '" + value + "'");
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (obs_len < 2) throw ConfigError("obs_len must be at least 2");
  if (pred_len < 1) throw ConfigError("pred_len must be at least 1");
  if (!d_graph || !d_scene || !d_k || !d_v) throw ConfigError("feature dimensions must be positive");
  if (sparsity_k < 1) throw ConfigError("sparsity_k must be at least 1");
  if (graph_layers < 1) throw ConfigError("graph_layers must be at least 1");
  if (!image_channels) throw ConfigError("image_channels must be positive");
  if (use_semantic && semantic_classes < 1) throw ConfigError("semantic_classes must be positive");
  if (encoder_channels.empty()) throw ConfigError("encoder_channels must be nonempty");
  if (tcn_kernel < 1) throw ConfigError("tcn_kernel must be positive");
  if (tcn_dilations.empty()) throw ConfigError("tcn_dilations must be nonempty");
}

std::string ModelConfig::to_text() const {
  std::ostringstream os;
  os << "obs_len=" << obs_len << '\n'
     << "pred_len=" << pred_len << '\n'
     << "d_graph=" << d_graph << '\n'
     << "d_scene=" << d_scene << '\n'
     << "d_k=" << d_k << '\n'
     << "d_v=" << d_v << '\n'
     << "sparsity_k=" << sparsity_k << '\n'
     << "graph_layers=" << graph_layers << '\n'
     << "image_channels=" << image_channels << '\n'
     << "semantic_classes=" << semantic_classes << '\n'
     << "encoder_channels=" << join(encoder_channels) << '\n'
     << "tcn_kernel=" << tcn_kernel << '\n'
     << "tcn_dilations=" << join(tcn_dilations) << '\n'
     << "use_semantic=" << (use_semantic ? 1 : 0) << '\n';
  return os.str();
}

ModelConfig ModelConfig::from_text(const std::string& body) {
  ModelConfig c;
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string line;
  while (std::getline(ss, line)) {
    auto t = text::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw FormatError("model config line without '=': " + std::string(t));
    kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
  }
  auto size_field = [&](const char* key, std::size_t& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("model config missing ") + key);
    auto v = text::parse_int(it->second);
    if (!v || *v < 0) throw FormatError(std::string("bad model config value for ") + key);
    dst = static_cast<std::size_t>(*v);
  };
  size_field("obs_len", c.obs_len);
  size_field("pred_len", c.pred_len);
  size_field("d_graph", c.d_graph);
  size_field("d_scene", c.d_scene);
  size_field("d_k", c.d_k);
  size_field("d_v", c.d_v);
  size_field("sparsity_k", c.sparsity_k);
  size_field("graph_layers", c.graph_layers);
  size_field("image_channels", c.image_channels);
  size_field("semantic_classes", c.semantic_classes);
  size_field("tcn_kernel", c.tcn_kernel);
  std::size_t sem = 0;
  size_field("use_semantic", sem);
  c.use_semantic = sem != 0;
  if (!kv.count("encoder_channels") || !kv.count("tcn_dilations")) throw FormatError("model config missing lists");
  c.encoder_channels = split_sizes("encoder_channels", kv["encoder_channels"]);
  c.tcn_dilations = split_sizes("tcn_dilations", kv["tcn_dilations"]);
  c.validate();
  return c;
}

}  // namespace sceneptp
