#include "sceneptp/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "sceneptp/errors.hpp"

namespace sceneptp {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'T', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxName = 1u << 12;
constexpr std::uint32_t kMaxRank = 8;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u32(std::ostream& out, std::uint32_t v) { write_bytes(out, &v, sizeof v); }

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  write_bytes(out, s.data(), s.size());
}

void read_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(std::string("checkpoint truncated in ") + what);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  read_bytes(in, &v, sizeof v, what);
  return v;
}

std::string read_string(std::istream& in, std::uint32_t limit, const char* what) {
  const std::uint32_t n = read_u32(in, what);
  if (n > limit) throw FormatError(std::string("checkpoint ") + what + " length " + std::to_string(n) + " is implausible");
  std::string s(n, '\0');
  read_bytes(in, s.data(), n, what);
  return s;
}

template <typename Stored, Real T>
void read_values(std::istream& in, std::span<T> dst) {
  std::vector<Stored> buf(dst.size());
  read_bytes(in, buf.data(), buf.size() * sizeof(Stored), "parameter values");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(buf[i]);
}

}  // namespace

template <Real T>
void save_checkpoint(std::ostream& out, const TrajectoryModel<T>& model) {
  write_bytes(out, kMagic, sizeof kMagic);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(sizeof(T)));
  write_string(out, model.config().to_text());
  const auto& items = model.parameters().items();
  write_u32(out, static_cast<std::uint32_t>(items.size()));
  for (const auto& [name, t] : items) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape()) write_u32(out, static_cast<std::uint32_t>(e));
    write_bytes(out, t.data().data(), t.numel() * sizeof(T));
  }
  if (!out) throw IoError("failed writing checkpoint");
}

template <Real T>
void save_checkpoint(const std::filesystem::path& path, const TrajectoryModel<T>& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_checkpoint(out, model);
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

template <Real T>
TrajectoryModel<T> load_checkpoint(std::istream& in) {
  char magic[4];
  read_bytes(in, magic, sizeof magic, "header");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("not a checkpoint file (bad magic)");
  const std::uint32_t version = read_u32(in, "header");
  if (version != kVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t width = read_u32(in, "header");
  if (width != 4 && width != 8) throw FormatError("unsupported value width " + std::to_string(width));
  ModelConfig config;
  try {
    config = ModelConfig::from_text(read_string(in, 1u << 16, "config"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  TrajectoryModel<T> model(config, 0);
  const auto& items = model.parameters().items();
  const std::uint32_t count = read_u32(in, "parameter count");
  if (count != items.size())
    throw IntegrityError("checkpoint has " + std::to_string(count) + " parameters, model expects " +
                         std::to_string(items.size()));
  for (const auto& [expected_name, t] : items) {
    const std::string name = read_string(in, kMaxName, "parameter name");
    if (name != expected_name) throw IntegrityError("expected parameter '" + expected_name + "', found '" + name + "'");
    const std::uint32_t rank = read_u32(in, "parameter shape");
    if (rank > kMaxRank) throw FormatError("parameter '" + name + "' has implausible rank");
    Shape shape(rank);
    for (auto& e : shape) e = read_u32(in, "parameter shape");
    if (shape != t.shape())
      throw IntegrityError("parameter '" + name + "' has shape " + shape_str(shape) + ", expected " + shape_str(t.shape()));
    Tensor<T> handle = t;
    auto dst = handle.mutable_data();
    if (width == 4)
      read_values<float>(in, dst);
    else
      read_values<double>(in, dst);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint");
  return model;
}

template <Real T>
TrajectoryModel<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_checkpoint<T>(in);
}

template void save_checkpoint(std::ostream&, const TrajectoryModel<float>&);
template void save_checkpoint(std::ostream&, const TrajectoryModel<double>&);
template void save_checkpoint(const std::filesystem::path&, const TrajectoryModel<float>&);
template void save_checkpoint(const std::filesystem::path&, const TrajectoryModel<double>&);
template TrajectoryModel<float> load_checkpoint<float>(std::istream&);
template TrajectoryModel<double> load_checkpoint<double>(std::istream&);
template TrajectoryModel<float> load_checkpoint<float>(const std::filesystem::path&);
template TrajectoryModel<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace sceneptp
