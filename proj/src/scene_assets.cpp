#include "sceneptp/scene_assets.hpp"

#include <istream>
#include <ostream>

#include "sceneptp/errors.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;
  const char* format;

  // Next line split into fields; throws at end of input.
  std::vector<std::string_view> next(std::string& storage, const char* what) {
    if (!std::getline(in, storage))
      throw FormatError(std::string(format) + ": unexpected end of input, expected " + what);
    ++line_no;
    return text::split_ws(storage);
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(std::string(format) + " line " + std::to_string(line_no) + ": " + message);
  }
  void expect_end() {
    std::string storage;
    while (std::getline(in, storage)) {
      ++line_no;
      if (!text::trim(storage).empty()) fail("trailing data after grid");
    }
  }
};

void read_header(LineReader& r, const char* magic, std::size_t dims[3]) {
  std::string line;
  auto f = r.next(line, "header");
  if (f.size() != 2 || f[0] != magic || f[1] != "1") r.fail(std::string("expected '") + magic + " 1'");
  auto d = r.next(line, "dimensions");
  if (d.size() != 3) r.fail("expected three dimensions");
  for (int i = 0; i < 3; ++i) {
    auto v = text::parse_int(d[i]);
    if (!v || *v < 1) r.fail("dimensions must be positive integers");
    dims[i] = static_cast<std::size_t>(*v);
  }
}

}  // namespace

SemanticGrid load_semantic_grid(std::istream& in) {
  LineReader r{in, 0, "SGRID"};
  std::size_t dims[3];
  read_header(r, "SGRID", dims);
  SemanticGrid g{dims[0], dims[1], dims[2], {}};
  g.ids.reserve(g.height * g.width);
  std::string line;
  for (std::size_t row = 0; row < g.height; ++row) {
    auto f = r.next(line, "grid row");
    if (f.size() != g.width) r.fail("expected " + std::to_string(g.width) + " class ids, got " + std::to_string(f.size()));
    for (auto tok : f) {
      auto v = text::parse_int(tok);
      if (!v) r.fail("non-integer class id '" + std::string(tok) + "'");
      if (*v < 0 || *v >= static_cast<long long>(g.class_count))
        r.fail("class id " + std::to_string(*v) + " outside [0, " + std::to_string(g.class_count) + ")");
      g.ids.push_back(static_cast<int>(*v));
    }
  }
  r.expect_end();
  return g;
}

void write_semantic_grid(std::ostream& out, const SemanticGrid& grid) {
  out << "SGRID 1\n" << grid.height << ' ' << grid.width << ' ' << grid.class_count << '\n';
  for (std::size_t row = 0; row < grid.height; ++row) {
    for (std::size_t c = 0; c < grid.width; ++c) out << (c ? " " : "") << grid.at(row, c);
    out << '\n';
  }
}

FrameRaster load_frame_raster(std::istream& in) {
  LineReader r{in, 0, "FGRID"};
  std::size_t dims[3];
  read_header(r, "FGRID", dims);
  FrameRaster f{dims[2], dims[0], dims[1], {}};
  f.values.reserve(f.channels * f.height * f.width);
  std::string line;
  for (std::size_t row = 0; row < f.channels * f.height; ++row) {
    auto fields = r.next(line, "raster row");
    if (fields.size() != f.width)
      r.fail("expected " + std::to_string(f.width) + " values, got " + std::to_string(fields.size()));
    for (auto tok : fields) {
      auto v = text::parse_double(tok);
      if (!v) r.fail("non-numeric value '" + std::string(tok) + "'");
      if (*v < 0.0 || *v > 1.0) r.fail("value " + std::string(tok) + " outside [0, 1]");
      f.values.push_back(*v);
    }
  }
  r.expect_end();
  return f;
}

void write_frame_raster(std::ostream& out, const FrameRaster& raster) {
  out << "FGRID 1\n" << raster.height << ' ' << raster.width << ' ' << raster.channels << '\n';
  for (std::size_t row = 0; row < raster.channels * raster.height; ++row) {
    for (std::size_t c = 0; c < raster.width; ++c)
      out << (c ? " " : "") << text::format_double(raster.values[row * raster.width + c]);
    out << '\n';
  }
}

std::vector<double> one_hot(const SemanticGrid& grid) {
  const std::size_t plane = grid.height * grid.width;
  std::vector<double> out(grid.class_count * plane, 0.0);
  for (std::size_t i = 0; i < plane; ++i) {
    const int id = grid.ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= grid.class_count)
      throw FormatError("class id " + std::to_string(id) + " outside [0, " + std::to_string(grid.class_count) + ")");
    out[static_cast<std::size_t>(id) * plane + i] = 1.0;
  }
  return out;
}

SemanticGrid align_semantic(const SemanticGrid& grid, std::size_t height, std::size_t width) {
  if (grid.height == height && grid.width == width) return grid;
  SemanticGrid out{height, width, grid.class_count, std::vector<int>(height * width)};
  const auto mismatch = [&] {
    return ConfigError("semantic grid " + std::to_string(grid.height) + "x" + std::to_string(grid.width) +
                       " cannot be aligned to raster " + std::to_string(height) + "x" + std::to_string(width));
  };
  if (height % grid.height == 0 && width % grid.width == 0 && height / grid.height == width / grid.width) {
    const std::size_t f = height / grid.height;
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c) out.ids[r * width + c] = grid.at(r / f, c / f);
    return out;
  }
  if (grid.height % height == 0 && grid.width % width == 0 && grid.height / height == grid.width / width) {
    const std::size_t f = grid.height / height;
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c) out.ids[r * width + c] = grid.at(r * f + f / 2, c * f + f / 2);
    return out;
  }
  throw mismatch();
}

}  // namespace sceneptp
