// Python bindings. Structured results cross the boundary as JSON text; the
// package wrapper decodes them.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bihflow/error.hpp"
#include "bihflow/flow.hpp"
#include "bihflow/harness.hpp"
#include "bihflow/kernel.hpp"
#include "bihflow/manifold.hpp"
#include "bihflow/norms.hpp"
#include "bihflow/semigroup.hpp"

namespace py = pybind11;
using namespace bihflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

kernel::MultiIndex to_index(const std::vector<int>& order) {
  if (order.size() > 3) throw Error(ErrorCode::InvalidArgument, "multi-index has more than 3 entries");
  kernel::MultiIndex a{0, 0, 0};
  std::copy(order.begin(), order.end(), a.begin());
  return a;
}

fields::Grid make_grid(int dim, double L, int M) {
  fields::Grid g{dim, L, M};
  g.validate();
  return g;
}

// (l, M, ..., M) array <-> component-major GridField.
fields::GridField to_field(const fields::Grid& g, const Array& a) {
  if (a.ndim() != g.dim + 1) throw Error(ErrorCode::InvalidArgument, "expected an array of shape (l, M, ...)");
  for (int d = 1; d <= g.dim; ++d)
    if (a.shape(d) != g.points_per_axis) throw Error(ErrorCode::InvalidArgument, "array does not match the grid");
  const int l = static_cast<int>(a.shape(0));
  return fields::GridField(g, l, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const fields::GridField& f) {
  std::vector<py::ssize_t> shape{f.codomain_dim()};
  for (int d = 0; d < f.grid().dim; ++d) shape.push_back(f.grid().points_per_axis);
  Array out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Array to_array(const fields::SpaceTimeField& u) {
  const auto& g = u.grid();
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(u.size()), u.codomain_dim()};
  for (int d = 0; d < g.dim; ++d) shape.push_back(g.points_per_axis);
  Array out(shape);
  double* p = out.mutable_data();
  for (const auto& f : u.frames()) p = std::copy(f.values().begin(), f.values().end(), p);
  return out;
}

std::vector<double> as_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

manifold::SphereTarget sphere(int l) {
  manifold::SphereTarget t;
  t.ambient_dim = l;
  t.validate();
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Biharmonic map heat flow numerics";
  m.attr("__version__") = harness::version();

  static py::exception<Error> error_type(m, "BihflowError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(to_string(e.code()));
      PyObject* exc = PyObject_CallFunction(error_type.ptr(), "s", e.what());
      PyObject_SetAttrString(exc, "code", code.ptr());
      PyErr_SetObject(error_type.ptr(), exc);
      Py_DECREF(exc);
    }
  });

  m.def(
      "eval_profile",
      [](const Array& xi, const std::vector<int>& order, double tol) {
        const auto p = kernel::KernelProfile::make(static_cast<int>(xi.size()), tol);
        return kernel::eval_profile(p, as_vector(xi), to_index(order));
      },
      py::arg("xi"), py::arg("order") = std::vector<int>{}, py::arg("tol") = 1e-12);

  m.def(
      "eval_kernel",
      [](const Array& x, double t, const std::vector<int>& order, double tol) {
        const auto p = kernel::KernelProfile::make(static_cast<int>(x.size()), tol);
        return kernel::eval_kernel(p, as_vector(x), t, to_index(order));
      },
      py::arg("x"), py::arg("t"), py::arg("order") = std::vector<int>{}, py::arg("tol") = 1e-12);

  m.def(
      "kernel_mass", [](int dim, double t) { return kernel::kernel_mass(kernel::KernelProfile::make(dim), t); },
      py::arg("dim"), py::arg("t"));

  m.def(
      "certify_json",
      [](const std::string& estimate, int dim, int order, double tol) {
        const auto est = kernel::parse_estimate(estimate);
        const auto p = kernel::KernelProfile::make(dim, tol);
        return kernel::to_json(kernel::certify_bound(p, est, order, kernel::default_samples(est))).dump();
      },
      py::arg("estimate"), py::arg("dim") = 1, py::arg("order") = 0, py::arg("tol") = 1e-12);

  m.def(
      "apply_G",
      [](const Array& u0, double L, double t) {
        const auto g = make_grid(static_cast<int>(u0.ndim()) - 1, L, static_cast<int>(u0.shape(1)));
        return to_array(semigroup::apply_G(to_field(g, u0), t));
      },
      py::arg("u0"), py::arg("L"), py::arg("t"), "Free biharmonic evolution of an (l, M, ...) array on [0, L)^n.");

  m.def(
      "project",
      [](const Array& y) {
        const auto t = sphere(static_cast<int>(y.size()));
        return manifold::project(t, as_vector(y));
      },
      py::arg("y"));

  m.def(
      "dpi",
      [](const Array& y, int order, std::vector<Array> dirs) {
        const auto t = sphere(static_cast<int>(y.size()));
        std::vector<std::vector<double>> vs;
        for (const auto& d : dirs) vs.push_back(as_vector(d));
        return manifold::dpi(t, as_vector(y), order, vs);
      },
      py::arg("y"), py::arg("order"), py::arg("directions"));

  m.def(
      "bmo_seminorm",
      [](const Array& f, double L, double R) {
        const auto g = make_grid(static_cast<int>(f.ndim()) - 1, L, static_cast<int>(f.shape(1)));
        return norms::bmo_seminorm(to_field(g, f), R);
      },
      py::arg("f"), py::arg("L"), py::arg("R"));

  m.def("parse_config", [](const std::string& text) { return harness::dump_config(harness::parse_config(text)); },
        py::arg("text"), "Validates INI text and returns its canonical form.");
  m.def(
      "config_json", [](const std::string& text) { return harness::config_snapshot(harness::parse_config(text)).dump(); },
      py::arg("text"));
  m.def("default_config", [] { return harness::dump_config(harness::RunConfig{}); });

  m.def(
      "evolve",
      [](const std::string& text) {
        const auto cfg = harness::parse_config(text);
        flow::FlowResult r;
        {
          py::gil_scoped_release release;
          r = flow::picard_solve(cfg.flow, harness::initial_data(cfg));
        }
        return py::make_tuple(r.solution.times(), to_array(r.solution), flow::to_json(r.diagnostics).dump());
      },
      py::arg("config"), "Runs the fixed-point solver; returns (times, frames, diagnostics JSON).");

  m.def(
      "run_suite",
      [](const std::string& suite, const std::string& text, const std::filesystem::path& out) {
        const auto cfg = harness::parse_config(text);
        harness::RunManifest man;
        {
          py::gil_scoped_release release;
          man = harness::run_suite(suite, cfg, out, "python:run_suite " + suite);
        }
        return harness::to_json(man).dump();
      },
      py::arg("suite"), py::arg("config"), py::arg("out_dir"));

  m.def("suite_ids", &harness::suite_ids);
}
