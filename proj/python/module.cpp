#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/empirics.hpp"
#include "gl3lab/error.hpp"
#include "gl3lab/error_term.hpp"
#include "gl3lab/moments.hpp"
#include "gl3lab/pipeline.hpp"
#include "gl3lab/random_model.hpp"
#include "gl3lab/voronoi.hpp"

namespace py = pybind11;
using namespace gl3lab;

namespace {

py::array_t<double> to_numpy(std::vector<double> v) {
  auto* heap = new std::vector<double>(std::move(v));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
  return py::array_t<double>(heap->size(), heap->data(), owner);
}

std::vector<double> from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw DimensionError("expected a one-dimensional array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_gl3lab, m) {
  m.doc() = "GL(3) coefficient tables, error terms and random models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());

  py::class_<MainTerm>(m, "MainTerm")
      .def_readonly("c2", &MainTerm::c2)
      .def_readonly("c1", &MainTerm::c1)
      .def_readonly("c0", &MainTerm::c0)
      .def("__call__", &MainTerm::operator());

  py::class_<CoefficientTable>(m, "CoefficientTable")
      .def("__len__", &CoefficientTable::size)
      .def("__getitem__", &CoefficientTable::at)
      .def_property_readonly("values", [](const CoefficientTable& t) {
        const auto v = t.values();
        return to_numpy(std::vector<double>(v.begin(), v.end()));
      })
      .def_property_readonly("provider", [](const CoefficientTable& t) { return std::string(to_string(t.provider())); })
      .def_property_readonly("main_term", &CoefficientTable::main_term)
      .def_property_readonly("source", &CoefficientTable::source)
      .def_property_readonly("rankin_selberg_constant", &CoefficientTable::rankin_selberg_constant)
      .def_property_readonly("warnings", &CoefficientTable::warnings);

  m.def("sieve_divisor3", [](std::uint64_t n) { return sieve_divisor3(n); }, py::arg("n_max"),
        py::call_guard<py::gil_scoped_release>());
  m.def("sym_square_tau_table", &sym_square_tau_table, py::arg("n_max"),
        py::call_guard<py::gil_scoped_release>());
  m.def("load_coefficients", &load_coefficients, py::arg("path"));
  m.def("save_coefficients", &save_coefficients, py::arg("table"), py::arg("path"));
  m.def("is_cube_free", &is_cube_free);
  m.def("hecke_max_violation", [](const CoefficientTable& t, std::uint64_t bound) {
    return hecke_consistency_check(t, bound).max_violation();
  }, py::arg("table"), py::arg("bound"));

  py::class_<ErrorTermSeries>(m, "ErrorTermSeries")
      .def("__len__", &ErrorTermSeries::size)
      .def("prefix", &ErrorTermSeries::prefix)
      .def_property_readonly("series_constant", [](const ErrorTermSeries& s) { return s.constant().value; });
  m.def("build_series", &build_series, py::arg("table"), py::keep_alive<0, 1>());
  m.def("delta_at", &delta_at, py::arg("series"), py::arg("x"));
  m.def("normalized_F", &normalized_F, py::arg("series"), py::arg("t"));
  m.def("mean_square_ratio", [](const ErrorTermSeries& s, double x, unsigned threads) {
    return mean_square_integral(s, x, threads).ratio;
  }, py::arg("series"), py::arg("x"), py::arg("threads") = 1);

  m.def("truncated_voronoi", [](const CoefficientTable& t, double x, double alpha) {
    VoronoiConfig cfg;
    cfg.alpha = alpha;
    return truncated_voronoi(t, x, cfg);
  }, py::arg("table"), py::arg("x"), py::arg("alpha") = 0.6);
  m.def("a_n_eval", &a_n_eval, py::arg("table"), py::arg("n"), py::arg("t"), py::arg("rmax"));

  py::class_<TruncatedModel>(m, "TruncatedModel")
      .def_property_readonly("n_model", &TruncatedModel::n_model)
      .def_property_readonly("r_model", &TruncatedModel::r_model)
      .def_property_readonly("kernel_count", [](const TruncatedModel& t) { return t.kernels().size(); });
  m.def("build_model", &build_model, py::arg("table"), py::arg("n_model"), py::arg("r_model") = 0);
  m.def("sample", [](const TruncatedModel& model, std::uint64_t seed, std::uint64_t draws, unsigned threads) {
    SampleBatch batch;
    {
      py::gil_scoped_release release;
      batch = sample_batch(model, seed, draws, threads);
    }
    return to_numpy(std::move(batch.values));
  }, py::arg("model"), py::arg("seed"), py::arg("draws"), py::arg("threads") = 1);
  m.def("exact_second_moment", &exact_second_moment);
  m.def("log_laplace_exact", &log_laplace_exact, py::arg("model"), py::arg("lam"));

  m.def("ks_distance", [](py::array_t<double> a, py::array_t<double> b) {
    return ks_distance(EmpiricalDistribution(from_numpy(a)), EmpiricalDistribution(from_numpy(b)));
  }, py::arg("a"), py::arg("b"));

  m.def("model_moment_exact", [](py::array_t<double> a, unsigned h) {
    return model_moment_exact(from_numpy(a), h);
  }, py::arg("coeffs"), py::arg("h"));
  m.def("time_average_power", [](py::array_t<double> a, double alpha0, unsigned h, double T) {
    return time_average_power(from_numpy(a), alpha0, h, T);
  }, py::arg("coeffs"), py::arg("alpha0"), py::arg("h"), py::arg("T"));
  m.def("lemma62_min_gap", [](unsigned mm, std::uint64_t M) {
    const auto g = lemma62_min_gap(mm, M);
    return py::make_tuple(static_cast<double>(g.min_gap), static_cast<double>(g.bound), g.witness,
                          g.witness_signs);
  }, py::arg("m"), py::arg("M"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("hash", &ExperimentConfig::hash)
      .def_readonly("provider", &ExperimentConfig::provider)
      .def_readonly("N", &ExperimentConfig::N)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("threads", &ExperimentConfig::threads);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("validate", [](const ExperimentConfig& c) { return validate(c); });
  m.def("run", [](const ExperimentConfig& c) {
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run(c);
    }
    py::dict out;
    out["status"] = r.status;
    out["error"] = r.error;
    out["diagnostics"] = r.diagnostics;
    out["reports"] = r.reports;
    return out;
  }, py::arg("config"));
}
