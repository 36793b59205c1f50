#pragma once

// Field dumps (CSV or flat little-endian binary) with a JSON sidecar
// {dim, L, M, l, times}, and small file helpers used by the harness.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bihflow/fields.hpp"

namespace bihflow::io {

namespace fs = std::filesystem;

enum class FrameFormat { Csv, Binary };

FrameFormat parse_frame_format(const std::string& s);
std::string to_string(FrameFormat f);

/// Writes <dir>/<stem>.csv or <stem>.bin plus <stem>.json; returns the paths
/// written. CSV rows are (frame, t, point, x_1..x_n, u_1..u_l); the binary
/// layout is doubles ordered [frame][component][point].
std::vector<fs::path> write_frames(const fs::path& dir, const std::string& stem, const fields::SpaceTimeField& u,
                                   FrameFormat format);

/// Reads a dump back from its sidecar.
fields::SpaceTimeField read_frames(const fs::path& sidecar);

nlohmann::json sidecar(const fields::SpaceTimeField& u, FrameFormat format, const std::string& data_file);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace bihflow::io
