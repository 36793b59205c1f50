#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bihflow/error.hpp"
#include "bihflow/harness.hpp"
#include "bihflow/io.hpp"

using namespace bihflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("bihflow_test_" + name);
  fs::remove_all(p);
  return p;
}

ErrorCode code_of(const std::string& text) {
  try {
    harness::parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("config dump and parse round trip") {
  harness::RunConfig c;
  c.flow.grid.points_per_axis = 64;
  c.flow.mode = flow::Mode::Intrinsic;
  c.initial.kind = harness::InitialKind::Circle;
  c.initial.winding = 2;
  c.run.amplitudes = {0.01, 0.03};
  c.run.frame_format = io::FrameFormat::Binary;
  const auto text = harness::dump_config(c);
  const auto back = harness::parse_config(text);
  CHECK(harness::dump_config(back) == text);
  CHECK(back.flow.grid.points_per_axis == 64);
  CHECK(back.flow.mode == flow::Mode::Intrinsic);
  CHECK(back.initial.winding == 2);
  CHECK(back.run.amplitudes == std::vector<double>{0.01, 0.03});
}

TEST_CASE("config rejects unknown keys and malformed values") {
  CHECK(code_of("[grid]\nbogus = 1\n") == ErrorCode::ConfigParse);
  CHECK(code_of("[nowhere]\ndim = 1\n") == ErrorCode::ConfigParse);
  CHECK(code_of("[grid]\npoints_per_axis = lots\n") == ErrorCode::ConfigParse);
  CHECK(code_of("[mode]\nmode = sideways\n") == ErrorCode::ConfigParse);
  CHECK(code_of("[picard]\ntol = -1\n") == ErrorCode::ConfigParse);
  try {
    harness::parse_config("[grid]\nbogus = 1\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("frame dumps round trip in both formats") {
  const fields::Grid g{1, 4.0, 16};
  const auto u0 = flow::equator_map(g, 3, 0.1);
  const fields::SpaceTimeField u({0.0, 0.25, 1.0 / 3.0}, {u0, 2.0 * u0, 0.1 * u0});
  const auto dir = scratch("frames");
  for (auto fmt : {io::FrameFormat::Csv, io::FrameFormat::Binary}) {
    const auto files = io::write_frames(dir, "u_" + io::to_string(fmt), u, fmt);
    REQUIRE(files.size() == 2);
    const auto back = io::read_frames(dir / ("u_" + io::to_string(fmt) + ".json"));
    CHECK(back.times() == u.times());
    REQUIRE(back.size() == u.size());
    for (std::size_t m = 0; m < u.size(); ++m) CHECK(back.frame(m).values() == u.frame(m).values());
  }
  CHECK_THROWS_AS(io::read_frames(dir / "missing.json"), Error);
  fs::remove_all(dir);
}

TEST_CASE("kernel suite writes a manifest with four certificates") {
  const auto dir = scratch("kernel_suite");
  harness::RunConfig c;
  const auto man = harness::run_suite("kernel", c, dir);
  CHECK(man.passed());
  CHECK(fs::exists(dir / "manifest.json"));
  const auto certs = io::read_json(dir / "kernel" / "certificates_n1.json");
  REQUIRE(certs.is_array());
  CHECK(certs.size() == 4);
  CHECK_THROWS_AS(harness::run_suite("nonsense", c, dir), Error);
  fs::remove_all(dir);
}

TEST_CASE("flow suite on constant data converges in one step") {
  const auto dir = scratch("flow_suite");
  harness::RunConfig c;
  c.flow.grid.points_per_axis = 32;
  c.flow.frames = 9;
  c.initial.kind = harness::InitialKind::Constant;
  const auto man = harness::run_suite("flow", c, dir);
  CHECK(man.passed());
  const auto diag = io::read_json(dir / "flow" / "diagnostics.json");
  CHECK(diag["differences"][0].get<double>() == 0.0);
  fs::remove_all(dir);
}
