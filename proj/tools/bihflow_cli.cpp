#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bihflow/error.hpp"
#include "bihflow/harness.hpp"
#include "bihflow/io.hpp"
#include "bihflow/kernel.hpp"

namespace {

using namespace bihflow;

int report(const harness::RunManifest& m, const std::string& out) {
  for (const auto& c : m.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  std::cout << m.files.size() << " files written to " << out << " (" << m.status << ")\n";
  return m.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biharmonic map heat flow experiments"};
  app.require_subcommand(1);
  std::string config_path, out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (kernel-verify with --estimate: output file)");
  app.add_option("--seed", seed, "seed for every random ensemble");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* kv = app.add_subcommand("kernel-verify", "certify kernel estimates");
  int dim = 1, order = 0;
  double tol = 1e-12;
  std::string estimate;
  kv->add_option("--dim", dim, "spatial dimension")->check(CLI::Range(1, 3));
  kv->add_option("--estimate", estimate, "2.2, 2.3, 2.4 or 2.5; omit to run the whole kernel suite");
  kv->add_option("--order", order, "derivative order")->check(CLI::Range(0, 4));
  kv->add_option("--tol", tol, "kernel tolerance")->check(CLI::PositiveNumber);

  auto* evolve = app.add_subcommand("evolve", "Picard solve from the configured initial data");
  auto* sweep = app.add_subcommand("contraction-sweep", "contraction factor over equator amplitudes");
  std::vector<double> amplitudes;
  sweep->add_option("--amplitudes", amplitudes, "comma-separated amplitudes")->delimiter(',');
  auto* norms = app.add_subcommand("norms", "BMO, Carleson and X-norm tables");
  auto* ops = app.add_subcommand("operators", "operator-bound ensemble");
  auto* dist = app.add_subcommand("distance", "distance-to-sphere estimate for the free evolution");
  auto* all = app.add_subcommand("all", "every suite");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = config_path.empty() ? harness::RunConfig{} : harness::load_config(config_path);
    if (seed) config.run.seed = *seed, config.flow.seed = *seed;
    if (threads) config.run.threads = *threads;
    std::string command;
    for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

    if (*kv) {
      if (!estimate.empty()) {
        const auto est = kernel::parse_estimate(estimate);
        const auto profile = kernel::KernelProfile::make(dim, tol, config.kernel.quadrature_nodes);
        kernel::CertifyOptions opts;
        opts.tail_rate = config.kernel.tail_rate;
        const auto cert = kernel::certify_bound(profile, est, order, kernel::default_samples(est), opts);
        const auto j = kernel::to_json(cert);
        if (out == "-" || out.empty())
          std::cout << j.dump(2) << "\n";
        else
          io::write_json(out, j);
        std::cout << "estimate " << cert.estimate_id << " order " << order << ": fitted constant "
                  << cert.fitted_constant << " over " << cert.samples << " samples (" << cert.excluded
                  << " excluded)\n";
        return 0;
      }
      config.kernel.dims = {dim};
      config.kernel.tolerance = tol;
      return report(harness::run_suite("kernel", config, out, command), out);
    }
    if (*evolve) return report(harness::run_suite("flow", config, out, command), out);
    if (*sweep) {
      if (amplitudes.empty()) amplitudes = config.run.amplitudes;
      return report(harness::run_contraction_sweep(config, amplitudes, out, command), out);
    }
    if (*norms) return report(harness::run_suite("norms", config, out, command), out);
    if (*ops) return report(harness::run_suite("operators", config, out, command), out);
    if (*dist) return report(harness::run_suite("distance", config, out, command), out);
    if (*all) return report(harness::run_suite("all", config, out, command), out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
