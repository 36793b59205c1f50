#include "bihflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numbers>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bihflow/error.hpp"
#include "bihflow/norms.hpp"
#include "bihflow/parallel.hpp"
#include "bihflow/rng.hpp"

#ifndef BIHFLOW_VERSION
#define BIHFLOW_VERSION "0.0.0"
#endif

namespace bihflow::harness {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"dim", "box_length", "points_per_axis"}},
      {"target", {"ambient_dim", "tube_radius", "blend_radius"}},
      {"time", {"T", "frames", "exponent", "phi_threshold"}},
      {"picard", {"max_iters", "tol", "tube_exit_policy", "constraint_tol", "orthogonality_probes"}},
      {"mode", {"mode"}},
      {"initial", {"kind", "amplitude", "winding", "point"}},
      {"kernel", {"dims", "orders", "tolerance", "quadrature_nodes", "tail_rate"}},
      {"norms", {"scales"}},
      {"run", {"seed", "threads", "members", "amplitudes", "family", "family_modes", "distance_delta", "distance_R",
               "distance_samples", "frame_format"}},
  };
  return s;
}

template <class T>
T parse_value(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  T v{};
  is >> v;
  if (!is || !(is >> std::ws).eof()) fail(ErrorCode::ConfigParse, "bad value for " + key + ": '" + raw + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) fail(ErrorCode::ConfigParse, "empty list entry in " + key);
    out.push_back(parse_value<T>(key, item.substr(b)));
  }
  if (out.empty()) fail(ErrorCode::ConfigParse, "empty list for " + key);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_floating_point_v<T>)
      os << io::format_double(v[i]);
    else
      os << v[i];
  }
  return os.str();
}

InitialKind parse_kind(const std::string& s) {
  if (s == "equator") return InitialKind::Equator;
  if (s == "circle") return InitialKind::Circle;
  if (s == "constant") return InitialKind::Constant;
  fail(ErrorCode::ConfigParse, "unknown initial.kind '" + s + "' (expected equator, circle or constant)");
}

std::string kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::Equator: return "equator";
    case InitialKind::Circle: return "circle";
    case InitialKind::Constant: return "constant";
  }
  return "equator";
}

bool all_finite(std::initializer_list<double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Writes reports and keeps the manifest's file list in emission order.
class Emitter {
 public:
  Emitter(const fs::path& root, RunManifest& manifest) : root_(root), manifest_(manifest) {}

  void json(const fs::path& rel, const nlohmann::json& j) {
    io::write_json(root_ / rel, j);
    add(rel);
  }
  void text(const fs::path& rel, const std::string& s) {
    io::write_text(root_ / rel, s);
    add(rel);
  }
  void frames(const fs::path& rel_dir, const std::string& stem, const fields::SpaceTimeField& u, io::FrameFormat f) {
    for (const auto& p : io::write_frames(root_ / rel_dir, stem, u, f)) add(fs::relative(p, root_));
  }
  void check(const std::string& name, bool ok, const std::string& detail) {
    manifest_.checks.push_back({name, ok, detail});
  }
  const fs::path& root() const { return root_; }

 private:
  void add(const fs::path& rel) { manifest_.files.push_back(rel.generic_string()); }
  fs::path root_;
  RunManifest& manifest_;
};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void kernel_suite(const RunConfig& c, Emitter& e) {
  using kernel::Estimate;
  for (int dim : c.kernel.dims) {
    const auto profile = kernel::KernelProfile::make(dim, c.kernel.tolerance, c.kernel.quadrature_nodes);
    kernel::CertifyOptions opts;
    opts.tail_rate = c.kernel.tail_rate;
    nlohmann::json certs = nlohmann::json::array();
    auto add = [&](Estimate est, int k) {
      const auto cert = kernel::certify_bound(profile, est, k, kernel::default_samples(est), opts);
      certs.push_back(kernel::to_json(cert));
      return cert;
    };
    bool finite = std::isfinite(add(Estimate::PointwiseGaussian, 0).fitted_constant);
    for (int k : c.kernel.orders) {
      finite = finite && std::isfinite(add(Estimate::PointwisePolynomial, k).fitted_constant);
      finite = finite && std::isfinite(add(Estimate::GradientL1, k).fitted_constant);
      finite = finite && std::isfinite(add(Estimate::ExponentialTail, k).fitted_constant);
    }
    const std::string tag = "n" + std::to_string(dim);
    e.json("kernel/certificates_" + tag + ".json", certs);
    e.check("kernel_certificates_finite_" + tag, finite, std::to_string(certs.size()) + " certificates");

    nlohmann::json mass = nlohmann::json::array();
    double worst = 0.0;
    for (double t : {1e-2, 1.0, 1e2}) {
      const double m = kernel::kernel_mass(profile, t);
      worst = std::max(worst, std::abs(m - 1.0));
      mass.push_back({{"t", t}, {"mass", m}});
    }
    e.json("kernel/mass_" + tag + ".json", mass);
    e.check("kernel_mass_" + tag, worst <= 1e-8, "max |mass - 1| = " + sci(worst));

    CounterRng rng(c.run.seed, 100 + static_cast<std::uint64_t>(dim));
    double ss = 0.0;
    for (int i = 0; i < 100; ++i) {
      std::array<double, 3> x{}, y{};
      for (int a = 0; a < dim; ++a) x[a] = rng.uniform(-3.0, 3.0), y[a] = 2.0 * x[a];
      const double t = std::exp(rng.uniform(-4.0, 4.0));
      const std::span<const double> xs(x.data(), dim), ys(y.data(), dim);
      ss = std::max(ss, std::abs(kernel::eval_kernel(profile, ys, 16.0 * t, {0, 0, 0}) -
                                 std::ldexp(kernel::eval_kernel(profile, xs, t, {0, 0, 0}), -dim)));
    }
    e.check("kernel_self_similarity_" + tag, ss <= 1e-12, "max deviation " + sci(ss));
  }
}

void operators_suite(const RunConfig& c, Emitter& e) {
  auto bc = c.bound_config();
  const auto base = semigroup::operator_bound_experiment(bc, c.flow.scheme);
  bc.members *= 2;
  const auto doubled = semigroup::operator_bound_experiment(bc, c.flow.scheme);
  nlohmann::json j{{"ensemble", semigroup::to_json(base)}, {"doubled", semigroup::to_json(doubled)}};
  j["growth_S"] = doubled.fitted_S / base.fitted_S - 1.0;
  j["growth_div"] = doubled.fitted_div / base.fitted_div - 1.0;
  e.json("operators/operator_bounds.json", j);
  std::ostringstream csv;
  csv << "operator,index,mode,amplitude,time_power,ratio\n";
  for (const auto& [name, rows] : {std::pair{"S", &doubled.S_members}, std::pair{"S_div", &doubled.div_members}})
    for (const auto& m : *rows)
      csv << name << ',' << m.index << ',' << m.mode << ',' << io::format_double(m.amplitude) << ','
          << io::format_double(m.time_power) << ',' << io::format_double(m.ratio) << '\n';
  e.text("operators/operator_members.csv", csv.str());
  e.check("operator_bounds_finite", all_finite({base.fitted_S, base.fitted_div, doubled.fitted_S, doubled.fitted_div}),
          "fitted S " + sci(base.fitted_S) + ", fitted S_div " + sci(base.fitted_div));

  // semigroup law on seeded band-limited data
  const auto& g = c.flow.grid;
  CounterRng rng(c.run.seed, 7);
  std::vector<std::array<double, 4>> terms;
  for (int i = 0; i < 6; ++i)
    terms.push_back({double(rng.integer(-8, 8)), double(rng.integer(-8, 8)), rng.uniform(-1, 1),
                     rng.uniform(0.0, 2 * std::numbers::pi)});
  const auto u0 = fields::sample(g, 1, [&](auto x, auto v) {
    v[0] = 0.0;
    for (const auto& t : terms) {
      double ph = t[3] + 2 * std::numbers::pi * t[0] * x[0] / g.box_length;
      if (g.dim > 1) ph += 2 * std::numbers::pi * t[1] * x[1] / g.box_length;
      v[0] += t[2] * std::cos(ph);
    }
  });
  const double s = 0.013, t = 0.029;
  const double law =
      (semigroup::apply_G(semigroup::apply_G(u0, s), t) - semigroup::apply_G(u0, s + t)).sup_norm();
  e.check("semigroup_law", law <= 1e-12, "max deviation " + sci(law));
}

void norms_suite(const RunConfig& c, Emitter& e) {
  const auto study = family_study(c);
  std::ostringstream csv, heat;
  csv << "mode,amplitude,R,bmo,carleson_grad,carleson_hess,x_norm_free\n";
  heat << "mode,amplitude,R,bmo,sup_norm,cylinder,weighted_sup,quartic\n";
  bool finite = true;
  for (const auto& m : study.members) {
    finite = finite && all_finite({m.bmo, m.carleson_grad, m.carleson_hess, m.x_norm_free});
    csv << m.mode << ',' << io::format_double(m.amplitude) << ',' << io::format_double(study.radii.front()) << ','
        << io::format_double(m.bmo) << ',' << io::format_double(m.carleson_grad) << ','
        << io::format_double(m.carleson_hess) << ',' << io::format_double(m.x_norm_free) << '\n';
    for (const auto& h : m.heat) {
      finite = finite && all_finite({h.cylinder, h.weighted_sup, h.quartic});
      heat << m.mode << ',' << io::format_double(m.amplitude) << ',' << io::format_double(h.R) << ','
           << io::format_double(h.bmo) << ',' << io::format_double(h.sup_norm) << ','
           << io::format_double(h.cylinder) << ',' << io::format_double(h.weighted_sup) << ','
           << io::format_double(h.quartic) << '\n';
    }
  }
  e.json("norms/norms.json", to_json(study));
  e.text("norms/norms.csv", csv.str());
  e.text("norms/heat_estimates.csv", heat.str());
  e.check("norms_finite", finite, std::to_string(study.members.size()) + " family members");
}

void flow_suite(const RunConfig& c, Emitter& e) {
  const auto u0 = initial_data(c);
  auto fc = c.flow;
  fc.seed = c.run.seed;
  nlohmann::json diag;
  fields::SpaceTimeField solution;
  bool converged = false;
  try {
    auto res = flow::picard_solve(fc, u0);
    diag = flow::to_json(res.diagnostics);
    converged = res.diagnostics.converged;
    solution = std::move(res.solution);
  } catch (const flow::ContractionFailure& ex) {
    diag = flow::to_json(ex.result().diagnostics);
    diag["error"] = ex.what();
    solution = ex.result().solution;
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::ManifoldTubeExit) throw;
    diag = {{"status", "tube-exit"}, {"error", ex.what()}, {"converged", false}};
  }
  if (solution.size() > 0) {
    e.frames("flow", "solution", solution, c.run.frame_format);
    if (converged) {
      const double res = flow::fixed_point_residual(fc, u0, solution);
      diag["fixed_point_residual"] = res;
      e.check("flow_fixed_point", res <= 2.0 * fc.picard_tol, "||u - T u||_X = " + sci(res));
    }
  }
  e.json("flow/diagnostics.json", diag);
  e.check("flow_converged", converged, std::string("status ") + diag.value("status", "unknown"));
  if (diag.contains("constraint")) {
    const auto& cons = diag["constraint"];
    e.check("flow_constraint", !cons["constraint_flag"].get<bool>(),
            "sup_t int rho = " + sci(cons["max_rho_mass"].get<double>()));
    const double orth = cons["max_orthogonality"].get<double>();
    e.check("flow_orthogonality", orth <= 1e-12, "max residual " + sci(orth));
  }
}

void distance_suite(const RunConfig& c, Emitter& e) {
  const auto u0 = initial_data(c);
  const auto profile = kernel::KernelProfile::make(c.flow.grid.dim, c.kernel.tolerance, c.kernel.quadrature_nodes);
  const auto r = flow::distance_experiment(u0, c.distance_radius(), c.run.distance_delta, c.run.distance_samples,
                                           &profile);
  e.json("distance/distance.json", flow::to_json(r));
  std::ostringstream csv;
  csv << "t,lhs,bmo_radius,bmo,rhs\n";
  for (const auto& row : r.rows)
    csv << io::format_double(row.t) << ',' << io::format_double(row.lhs) << ',' << io::format_double(row.bmo_radius)
        << ',' << io::format_double(row.bmo) << ',' << io::format_double(row.rhs) << '\n';
  e.text("distance/distance.csv", csv.str());
  e.check("distance_estimate", r.holds,
          "K = " + io::format_double(r.K) + ", min slack " + sci(r.min_slack) + ", skipped " + std::to_string(r.skipped));
}

template <class Body>
RunManifest with_manifest(const RunConfig& config, const fs::path& out_dir, const std::string& command, Body&& body) {
  config.validate();
  RunManifest m;
  m.command = command;
  m.config = config_snapshot(config);
  m.version = version();
  const auto start = std::chrono::steady_clock::now();
  const auto manifest_path = out_dir / "manifest.json";
  io::write_json(manifest_path, to_json(m));
  const int saved_threads = thread_count();
  set_thread_count(config.run.threads);
  Emitter e(out_dir, m);
  try {
    body(e);
    m.status = m.passed() ? "passed" : "failed";
  } catch (const std::exception& ex) {
    m.status = "error";
    m.checks.push_back({"run", false, ex.what()});
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_json(manifest_path, to_json(m));
    set_thread_count(saved_threads);
    throw;
  }
  set_thread_count(saved_threads);
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_json(manifest_path, to_json(m));
  return m;
}

}  // namespace

std::string version() noexcept { return BIHFLOW_VERSION; }

void RunConfig::validate() const {
  flow.validate();
  require(!kernel.dims.empty(), ErrorCode::ConfigParse, "kernel.dims is empty");
  for (int d : kernel.dims) require(d >= 1 && d <= 3, ErrorCode::ConfigParse, "kernel.dims entries must be 1..3");
  for (int k : kernel.orders)
    require(k >= 1 && k <= 4, ErrorCode::ConfigParse, "kernel.orders entries must be 1..4");
  require(run.members >= 1, ErrorCode::ConfigParse, "run.members must be positive");
  require(!run.family.empty() && !run.family_modes.empty(), ErrorCode::ConfigParse, "run.family is empty");
  require(run.threads >= 1, ErrorCode::ConfigParse, "run.threads must be positive");
  require(run.distance_delta > 0.0, ErrorCode::ConfigParse, "run.distance_delta must be positive");
  require(run.distance_R >= 0.0, ErrorCode::ConfigParse, "run.distance_R must be nonnegative");
  if (initial.kind == InitialKind::Constant)
    require(static_cast<int>(initial.point.size()) == flow.target.ambient_dim, ErrorCode::ConfigParse,
            "initial.point length must equal target.ambient_dim");
}

semigroup::BoundExperimentConfig RunConfig::bound_config() const {
  semigroup::BoundExperimentConfig b;
  b.grid = flow.grid;
  b.T = flow.T;
  b.frames = flow.frames;
  b.time_exponent = flow.time_exponent;
  b.members = run.members;
  b.seed = run.seed;
  b.norm_options = flow.norm_options;
  return b;
}

double RunConfig::distance_radius() const {
  if (run.distance_R > 0.0) return run.distance_R;
  return std::min(std::pow(flow.T, 0.25), 0.5 * flow.grid.box_length);
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& ex) {
    fail(ErrorCode::ConfigParse, std::string("config: ") + ex.message() + " (line " + std::to_string(ex.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) fail(ErrorCode::ConfigParse, "config: key '" + section + "' outside any section");
      fail(ErrorCode::ConfigParse, "config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key))
        fail(ErrorCode::ConfigParse, "config: unknown key '" + key + "' in [" + section + "]");
  }
  RunConfig c;
  auto get = [&](const std::string& path, auto& target) {
    const auto v = tree.get_optional<std::string>(path);
    if (!v) return;
    using T = std::decay_t<decltype(target)>;
    if constexpr (std::is_same_v<T, std::string>)
      target = *v;
    else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>)
      target = parse_list<typename T::value_type>(path, *v);
    else
      target = parse_value<T>(path, *v);
  };
  get("grid.dim", c.flow.grid.dim);
  get("grid.box_length", c.flow.grid.box_length);
  get("grid.points_per_axis", c.flow.grid.points_per_axis);
  get("target.ambient_dim", c.flow.target.ambient_dim);
  get("target.tube_radius", c.flow.target.tube_radius);
  get("target.blend_radius", c.flow.target.blend_radius);
  get("time.T", c.flow.T);
  get("time.frames", c.flow.frames);
  get("time.exponent", c.flow.time_exponent);
  get("time.phi_threshold", c.flow.scheme.phi_threshold);
  get("picard.max_iters", c.flow.max_picard_iters);
  get("picard.tol", c.flow.picard_tol);
  get("picard.constraint_tol", c.flow.constraint_tol);
  get("picard.orthogonality_probes", c.flow.orthogonality_probes);
  std::string policy = flow::to_string(c.flow.tube_exit_policy), mode = flow::to_string(c.flow.mode);
  get("picard.tube_exit_policy", policy);
  get("mode.mode", mode);
  std::string kind = kind_name(c.initial.kind), format = io::to_string(c.run.frame_format);
  get("initial.kind", kind);
  get("initial.amplitude", c.initial.amplitude);
  get("initial.winding", c.initial.winding);
  get("initial.point", c.initial.point);
  get("kernel.dims", c.kernel.dims);
  get("kernel.orders", c.kernel.orders);
  get("kernel.tolerance", c.kernel.tolerance);
  get("kernel.quadrature_nodes", c.kernel.quadrature_nodes);
  get("kernel.tail_rate", c.kernel.tail_rate);
  get("norms.scales", c.flow.norm_options.scales);
  get("run.seed", c.run.seed);
  get("run.threads", c.run.threads);
  get("run.members", c.run.members);
  get("run.amplitudes", c.run.amplitudes);
  get("run.family", c.run.family);
  get("run.family_modes", c.run.family_modes);
  get("run.distance_delta", c.run.distance_delta);
  get("run.distance_R", c.run.distance_R);
  get("run.distance_samples", c.run.distance_samples);
  get("run.frame_format", format);
  try {
    c.flow.tube_exit_policy = flow::parse_policy(policy);
    c.flow.mode = flow::parse_mode(mode);
    c.run.frame_format = io::parse_frame_format(format);
  } catch (const Error& ex) {
    fail(ErrorCode::ConfigParse, std::string("config: ") + ex.what());
  }
  c.initial.kind = parse_kind(kind);
  c.flow.seed = c.run.seed;
  try {
    c.validate();
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::ConfigParse) throw;
    fail(ErrorCode::ConfigParse, std::string("config: ") + ex.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::ConfigParse, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& ex) {
    fail(ErrorCode::ConfigParse, path.string() + ": " + ex.what());
  }
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  auto d = [](double v) { return io::format_double(v); };
  os << "[grid]\ndim = " << c.flow.grid.dim << "\nbox_length = " << d(c.flow.grid.box_length)
     << "\npoints_per_axis = " << c.flow.grid.points_per_axis << "\n\n";
  os << "[target]\nambient_dim = " << c.flow.target.ambient_dim << "\ntube_radius = " << d(c.flow.target.tube_radius)
     << "\nblend_radius = " << d(c.flow.target.blend_radius) << "\n\n";
  os << "[time]\nT = " << d(c.flow.T) << "\nframes = " << c.flow.frames << "\nexponent = " << d(c.flow.time_exponent)
     << "\nphi_threshold = " << d(c.flow.scheme.phi_threshold) << "\n\n";
  os << "[picard]\nmax_iters = " << c.flow.max_picard_iters << "\ntol = " << d(c.flow.picard_tol)
     << "\ntube_exit_policy = " << flow::to_string(c.flow.tube_exit_policy)
     << "\nconstraint_tol = " << d(c.flow.constraint_tol)
     << "\northogonality_probes = " << c.flow.orthogonality_probes << "\n\n";
  os << "[mode]\nmode = " << flow::to_string(c.flow.mode) << "\n\n";
  os << "[initial]\nkind = " << kind_name(c.initial.kind) << "\namplitude = " << d(c.initial.amplitude)
     << "\nwinding = " << c.initial.winding << "\npoint = " << join(c.initial.point) << "\n\n";
  os << "[kernel]\ndims = " << join(c.kernel.dims) << "\norders = " << join(c.kernel.orders)
     << "\ntolerance = " << d(c.kernel.tolerance) << "\nquadrature_nodes = " << c.kernel.quadrature_nodes
     << "\ntail_rate = " << d(c.kernel.tail_rate) << "\n\n";
  os << "[norms]\nscales = " << c.flow.norm_options.scales << "\n\n";
  os << "[run]\nseed = " << c.run.seed << "\nthreads = " << c.run.threads << "\nmembers = " << c.run.members
     << "\namplitudes = " << join(c.run.amplitudes) << "\nfamily = " << join(c.run.family)
     << "\nfamily_modes = " << join(c.run.family_modes)
     << "\ndistance_delta = " << d(c.run.distance_delta) << "\ndistance_R = " << d(c.run.distance_R)
     << "\ndistance_samples = " << c.run.distance_samples << "\nframe_format = " << io::to_string(c.run.frame_format)
     << "\n";
  return os.str();
}

nlohmann::json config_snapshot(const RunConfig& c) {
  // every value as it was used, grouped like the INI sections
  pt::ptree tree;
  std::istringstream is(dump_config(c));
  pt::ini_parser::read_ini(is, tree);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, body] : tree)
    for (const auto& [key, value] : body) j[section][key] = value.data();
  return j;
}

flow::GridField initial_data(const RunConfig& c) {
  const auto& g = c.flow.grid;
  const int l = c.flow.target.ambient_dim;
  switch (c.initial.kind) {
    case InitialKind::Equator: return flow::equator_map(g, l, c.initial.amplitude);
    case InitialKind::Circle: return flow::circle_map(g, l, c.initial.winding);
    case InitialKind::Constant: return flow::constant_map(g, c.initial.point);
  }
  fail(ErrorCode::InvalidArgument, "unknown initial data kind");
}

FamilyStudy family_study(const RunConfig& c, int scales) {
  const auto& g = c.flow.grid;
  const int l = c.flow.target.ambient_dim;
  const double R0 = c.distance_radius();
  const auto profile = kernel::KernelProfile::make(g.dim, c.kernel.tolerance, c.kernel.quadrature_nodes);
  const auto times = c.flow.times();
  FamilyStudy s;
  for (int j = 0; j < scales; ++j) {
    const double r = R0 * std::exp2(-j);
    if (r <= 2.0 * g.spacing()) break;
    s.radii.push_back(r);
  }
  require(!s.radii.empty(), ErrorCode::ScaleUnresolvable, "family radius is below two grid spacings");
  const auto q = s.radii.size();
  s.cylinder_constant.assign(q, 0.0);
  s.weighted_constant.assign(q, 0.0);
  s.quartic_constant.assign(q, 0.0);
  for (int mode : c.run.family_modes)
    for (double a : c.run.family) {
      FamilyMember m;
      m.mode = mode;
      m.amplitude = a;
      const auto u0 = flow::equator_map(g, l, a, mode);
      m.bmo = norms::bmo_seminorm(u0, R0);
      m.carleson_grad = norms::carleson_functional(u0, profile, 1, R0);
      m.carleson_hess = norms::carleson_functional(u0, profile, 2, R0);
      m.x_norm_free = norms::x_norm(semigroup::free_evolution(u0, times), c.flow.T, c.flow.norm_options).total;
      const double b2 = m.bmo * m.bmo;
      s.carleson_grad_constant = std::max(s.carleson_grad_constant, m.carleson_grad / b2);
      s.carleson_hess_constant = std::max(s.carleson_hess_constant, m.carleson_hess / b2);
      for (std::size_t i = 0; i < q; ++i) {
        const auto h = flow::heat_estimates(u0, s.radii[i]);
        const double hb2 = h.bmo * h.bmo;
        s.cylinder_constant[i] = std::max(s.cylinder_constant[i], h.cylinder / hb2);
        s.weighted_constant[i] = std::max(s.weighted_constant[i], h.weighted_sup / h.bmo);
        s.quartic_constant[i] = std::max(s.quartic_constant[i], h.quartic / (h.sup_norm * h.sup_norm * hb2));
        m.heat.push_back(h);
      }
      s.members.push_back(std::move(m));
    }
  auto drift = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo - 1.0;
  };
  s.cylinder_drift = drift(s.cylinder_constant);
  s.weighted_drift = drift(s.weighted_constant);
  s.quartic_drift = drift(s.quartic_constant);
  return s;
}

nlohmann::json to_json(const FamilyStudy& s) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : s.members) {
    nlohmann::json heat = nlohmann::json::array();
    for (const auto& h : m.heat)
      heat.push_back({{"R", h.R}, {"bmo", h.bmo}, {"sup_norm", h.sup_norm}, {"cylinder", h.cylinder},
                      {"weighted_sup", h.weighted_sup}, {"quartic", h.quartic}});
    members.push_back({{"mode", m.mode}, {"amplitude", m.amplitude}, {"bmo", m.bmo},
                       {"carleson_grad", m.carleson_grad}, {"carleson_hess", m.carleson_hess},
                       {"x_norm_free", m.x_norm_free}, {"heat_estimates", heat}});
  }
  return {{"radii", s.radii},
          {"carleson_grad_constant", s.carleson_grad_constant},
          {"carleson_hess_constant", s.carleson_hess_constant},
          {"cylinder_constant", s.cylinder_constant},
          {"weighted_constant", s.weighted_constant},
          {"quartic_constant", s.quartic_constant},
          {"cylinder_drift", s.cylinder_drift},
          {"weighted_drift", s.weighted_drift},
          {"quartic_drift", s.quartic_drift},
          {"members", members}};
}

bool RunManifest::passed() const {
  for (const auto& ch : checks)
    if (!ch.passed) return false;
  return true;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : m.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"command", m.command}, {"config", m.config},   {"version", m.version}, {"wall_time_seconds", m.wall_time},
          {"files", m.files},     {"checks", checks},     {"status", m.status}};
}

std::vector<std::string> suite_ids() { return {"kernel", "operators", "norms", "flow", "distance", "all"}; }

RunManifest run_suite(const std::string& suite, const RunConfig& config, const fs::path& out_dir,
                      const std::string& command) {
  const auto ids = suite_ids();
  require(std::find(ids.begin(), ids.end(), suite) != ids.end(), ErrorCode::InvalidArgument,
          "unknown suite '" + suite + "' (expected kernel, operators, norms, flow, distance or all)");
  return with_manifest(config, out_dir, command.empty() ? suite : command, [&](Emitter& e) {
    const bool all = suite == "all";
    if (all || suite == "kernel") kernel_suite(config, e);
    if (all || suite == "operators") operators_suite(config, e);
    if (all || suite == "norms") norms_suite(config, e);
    if (all || suite == "flow") flow_suite(config, e);
    if (all || suite == "distance") distance_suite(config, e);
  });
}

RunManifest run_contraction_sweep(const RunConfig& config, const std::vector<double>& amplitudes,
                                  const fs::path& out_dir, const std::string& command) {
  require(!amplitudes.empty(), ErrorCode::InvalidArgument, "contraction sweep needs at least one amplitude");
  return with_manifest(config, out_dir, command.empty() ? "contraction-sweep" : command, [&](Emitter& e) {
    auto fc = config.flow;
    fc.seed = config.run.seed;
    const auto rows = flow::contraction_sweep(fc, amplitudes);
    std::ostringstream csv;
    csv << "amplitude,bmo,theta_max,converged,iterations,status\n";
    for (const auto& r : rows)
      csv << io::format_double(r.amplitude) << ',' << io::format_double(r.bmo) << ','
          << io::format_double(r.theta_max) << ',' << (r.converged ? "true" : "false") << ',' << r.iterations << ','
          << r.status << '\n';
    e.text("contraction_sweep.csv", csv.str());
  });
}

}  // namespace bihflow::harness
