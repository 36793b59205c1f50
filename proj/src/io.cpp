#include "bihflow/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bihflow/error.hpp"

namespace bihflow::io {

FrameFormat parse_frame_format(const std::string& s) {
  if (s == "csv") return FrameFormat::Csv;
  if (s == "binary" || s == "bin") return FrameFormat::Binary;
  fail(ErrorCode::InvalidArgument, "unknown frame format '" + s + "' (expected csv or binary)");
}

std::string to_string(FrameFormat f) { return f == FrameFormat::Csv ? "csv" : "binary"; }

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) fail(ErrorCode::Io, "write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

nlohmann::json sidecar(const fields::SpaceTimeField& u, FrameFormat format, const std::string& data_file) {
  const auto& g = u.grid();
  return {{"dim", g.dim},
          {"L", g.box_length},
          {"M", g.points_per_axis},
          {"l", u.codomain_dim()},
          {"times", u.times()},
          {"format", to_string(format)},
          {"data", data_file}};
}

std::vector<fs::path> write_frames(const fs::path& dir, const std::string& stem, const fields::SpaceTimeField& u,
                                   FrameFormat format) {
  u.validate();
  fs::create_directories(dir);
  const auto& g = u.grid();
  const int l = u.codomain_dim();
  const auto data = dir / (stem + (format == FrameFormat::Csv ? ".csv" : ".bin"));
  if (format == FrameFormat::Csv) {
    std::ostringstream os;
    os << "frame,t,point";
    for (int a = 0; a < g.dim; ++a) os << ",x" << a + 1;
    for (int c = 0; c < l; ++c) os << ",u" << c + 1;
    os << "\n";
    for (std::size_t m = 0; m < u.size(); ++m) {
      const auto& f = u.frame(m);
      const std::string t = format_double(u.times()[m]);
      for (std::size_t p = 0; p < g.point_count(); ++p) {
        os << m << ',' << t << ',' << p;
        for (int a = 0; a < g.dim; ++a) os << ',' << format_double(g.coordinate(p, a));
        for (int c = 0; c < l; ++c) os << ',' << format_double(f(p, c));
        os << '\n';
      }
    }
    write_text(data, os.str());
  } else {
    static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
    std::ofstream os(data, std::ios::binary);
    if (!os) fail(ErrorCode::Io, "cannot open " + data.string() + " for writing");
    for (const auto& f : u.frames())
      os.write(reinterpret_cast<const char*>(f.values().data()),
               static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!os) fail(ErrorCode::Io, "write failed for " + data.string());
  }
  const auto side = dir / (stem + ".json");
  write_json(side, sidecar(u, format, data.filename().string()));
  return {data, side};
}

fields::SpaceTimeField read_frames(const fs::path& path) {
  const auto j = read_json(path);
  fields::Grid g;
  std::vector<double> times;
  int l = 0;
  FrameFormat format;
  std::string data;
  try {
    g = {j.at("dim").get<int>(), j.at("L").get<double>(), j.at("M").get<int>()};
    l = j.at("l").get<int>();
    times = j.at("times").get<std::vector<double>>();
    format = parse_frame_format(j.at("format").get<std::string>());
    data = j.at("data").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, path.string() + ": malformed sidecar: " + e.what());
  }
  g.validate();
  const auto file = path.parent_path() / data;
  const auto N = g.point_count();
  std::vector<fields::GridField> frames;
  if (format == FrameFormat::Binary) {
    std::ifstream is(file, std::ios::binary);
    if (!is) fail(ErrorCode::Io, "cannot open " + file.string());
    for (std::size_t m = 0; m < times.size(); ++m) {
      std::vector<double> v(N * l);
      is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
      if (!is) fail(ErrorCode::Io, file.string() + ": truncated frame data");
      frames.emplace_back(g, l, std::move(v));
    }
  } else {
    std::ifstream is(file);
    if (!is) fail(ErrorCode::Io, "cannot open " + file.string());
    for (std::size_t m = 0; m < times.size(); ++m) frames.emplace_back(g, l);
    std::string line;
    std::getline(is, line);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
      std::vector<double> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
      if (cells.size() != static_cast<std::size_t>(3 + g.dim + l))
        fail(ErrorCode::Io, file.string() + ": wrong column count in row " + std::to_string(rows + 1));
      const auto m = static_cast<std::size_t>(cells[0]);
      const auto p = static_cast<std::size_t>(cells[2]);
      if (m >= times.size() || p >= N) fail(ErrorCode::Io, file.string() + ": index out of range");
      for (int c = 0; c < l; ++c) frames[m](p, c) = cells[3 + g.dim + c];
      ++rows;
    }
    if (rows != times.size() * N) fail(ErrorCode::Io, file.string() + ": expected " + std::to_string(times.size() * N) + " rows");
  }
  return fields::SpaceTimeField(std::move(times), std::move(frames));
}

}  // namespace bihflow::io
