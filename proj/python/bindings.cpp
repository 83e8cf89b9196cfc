#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "ltrawl/error.hpp"
#include "ltrawl/extremes.hpp"
#include "ltrawl/inference.hpp"
#include "ltrawl/io.hpp"
#include "ltrawl/trawl.hpp"

namespace py = pybind11;
using namespace ltrawl;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> times_or_grid(std::optional<std::vector<double>> times, std::optional<std::size_t> n) {
  if (times) return *times;
  if (!n) throw std::invalid_argument("give either times or n");
  return regular_grid(*n);
}

ExceedanceSeries series_from(const std::vector<double>& values, std::optional<std::vector<double>> times) {
  return ExceedanceSeries::from_values(times ? *times : regular_grid(values.size()), values);
}

py::array_t<double> matrix(const Matrix4& m) {
  py::array_t<double> out({4, 4});
  auto r = out.mutable_unchecked<2>();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = m(i, j);
  return out;
}

py::dict fit_to_dict(const FitResult& f) {
  py::dict d;
  const auto names = ModelParams::parameter_names(f.params.variant);
  py::dict est, se;
  for (int i = 0; i < 4; ++i) {
    est[py::str(names[i])] = f.estimate[i];
    se[py::str(names[i])] = f.standard_error[i];
  }
  d["params"] = f.params;
  d["estimates"] = est;
  d["standard_errors"] = se;
  d["covariance"] = matrix(f.covariance);
  d["log_pairwise_likelihood"] = f.log_pl;
  d["gradient_norm"] = f.gradient_norm;
  d["converged"] = f.converged;
  d["iterations"] = f.simplex_iterations + f.polish_iterations;
  d["message"] = f.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent trawl models for threshold exceedances";

  auto base = py::register_exception<Error>(m, "LtrawlError", PyExc_RuntimeError);
  py::register_exception<PairDensityError>(m, "PairDensityError", base.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());

  py::class_<TrawlSpec>(m, "TrawlSpec")
      .def(py::init([](const std::vector<std::pair<double, double>>& terms) {
             std::vector<TrawlTerm> t;
             for (const auto& [w, r] : terms) t.push_back({w, r});
             return TrawlSpec(std::move(t));
           }),
           py::arg("terms"), "List of (weight, decay) pairs with weights summing to one.")
      .def_static("exponential", &TrawlSpec::exponential, py::arg("decay"))
      .def_property_readonly("leb", &TrawlSpec::leb)
      .def("leb_intersection", &TrawlSpec::leb_intersection, py::arg("h"))
      .def("acf", &TrawlSpec::acf, py::arg("h"))
      .def("slice_partition", [](const TrawlSpec& s, const std::vector<double>& times) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& sl : slice_partition(s, times).slices) out.emplace_back(sl.first, sl.last, sl.measure);
        return out;
      }, py::arg("times"), "Slices as (first, last, measure) with zero-based indices.");

  py::enum_<Variant>(m, "Variant")
      .value("ORIGINAL", Variant::Original)
      .value("MT", Variant::MarginalTransform);

  py::class_<ModelParams>(m, "ModelParams")
      .def_static("original", py::overload_cast<double, double, double, double>(&ModelParams::original),
                  py::arg("alpha"), py::arg("beta"), py::arg("rho"), py::arg("kappa"))
      .def_static("marginal_transform", &ModelParams::marginal_transform, py::arg("xi"), py::arg("sigma"),
                  py::arg("rho"), py::arg("kappa"))
      .def_readonly("variant", &ModelParams::variant)
      .def_readonly("alpha", &ModelParams::alpha)
      .def_readonly("beta", &ModelParams::beta)
      .def_readonly("kappa", &ModelParams::kappa)
      .def_readonly("xi", &ModelParams::xi)
      .def_readonly("sigma", &ModelParams::sigma)
      .def_readonly("trawl", &ModelParams::trawl)
      .def("natural", &ModelParams::natural)
      .def("parameter_names", [](const ModelParams& p) { return ModelParams::parameter_names(p.variant); })
      .def("__repr__", [](const ModelParams& p) {
        const auto n = p.natural();
        const auto k = ModelParams::parameter_names(p.variant);
        std::string s = "ModelParams(";
        for (int i = 0; i < 4; ++i) s += (i ? ", " : "") + k[i] + "=" + format_double(n[i]);
        return s + ")";
      });

  m.def("simulate_trawl",
        [](double alpha, double beta, const TrawlSpec& spec, std::optional<std::vector<double>> times,
           std::optional<std::size_t> n, std::uint64_t seed) {
          return to_array(simulate_trawl({alpha, beta}, spec, times_or_grid(std::move(times), n), seed));
        },
        py::arg("alpha"), py::arg("beta"), py::arg("trawl"), py::arg("times") = py::none(),
        py::arg("n") = py::none(), py::arg("seed"));
  m.def("simulate_exceedances",
        [](const ModelParams& p, std::optional<std::vector<double>> times, std::optional<std::size_t> n,
           std::uint64_t seed) {
          return to_array(simulate_exceedances(p, times_or_grid(std::move(times), n), seed).values);
        },
        py::arg("params"), py::arg("times") = py::none(), py::arg("n") = py::none(), py::arg("seed"));

  m.def("exceedance_prob", &exceedance_prob, py::arg("params"));
  m.def("kappa_for_exceedance_prob", &kappa_for_exceedance_prob, py::arg("alpha"), py::arg("beta"), py::arg("p"));
  m.def("mean_exceedance", &mean_exceedance, py::arg("params"));
  m.def("acov_exceedance", &acov_exceedance, py::arg("params"), py::arg("h"));
  m.def("acf_exceedance", &acf_exceedance, py::arg("params"), py::arg("h"));
  m.def("joint_exceedance_survivor", &joint_exceedance_survivor, py::arg("params"), py::arg("h"), py::arg("x0"),
        py::arg("xh"));

  m.def("pair_density", &pair_density, py::arg("params"), py::arg("h"), py::arg("x1"), py::arg("x2"));
  m.def("pair_density_mt", &pair_density_mt, py::arg("params"), py::arg("h"), py::arg("z1"), py::arg("z2"));
  m.def("log_pairwise_likelihood",
        [](const std::vector<double>& values, const ModelParams& p, int delta,
           std::optional<std::vector<double>> times) {
          PLConfig c;
          c.delta = delta;
          return log_pairwise_likelihood(series_from(values, std::move(times)), p, c);
        },
        py::arg("values"), py::arg("params"), py::arg("delta") = 4, py::arg("times") = py::none());
  m.def("full_likelihood_small_k",
        [](const std::vector<double>& values, const ModelParams& p, std::optional<std::vector<double>> times) {
          return full_likelihood_small_k(series_from(values, std::move(times)), p);
        },
        py::arg("values"), py::arg("params"), py::arg("times") = py::none());
  m.def("init_heuristic",
        [](const std::vector<double>& values, Variant v) { return init_heuristic(series_from(values, {}), v); },
        py::arg("values"), py::arg("variant") = Variant::Original);
  m.def("fit",
        [](const std::vector<double>& values, Variant v, int delta, std::optional<std::vector<double>> times,
           std::optional<ModelParams> init) {
          PLConfig c;
          c.delta = delta;
          py::gil_scoped_release release;
          const auto f = fit(series_from(values, std::move(times)), v, c, init);
          py::gil_scoped_acquire acquire;
          return fit_to_dict(f);
        },
        py::arg("values"), py::arg("variant") = Variant::Original, py::arg("delta") = 4,
        py::arg("times") = py::none(), py::arg("init") = py::none(),
        "Maximum pairwise likelihood fit of exceedances on a regular grid unless times are given.");

  m.def("f2e", &f2e, py::arg("params"), py::arg("h"), py::arg("x"));
  m.def("f2e_inverse", &f2e_inverse, py::arg("params"), py::arg("h"), py::arg("p"));
  m.def("cond_tail_dep", &cond_tail_dep, py::arg("params"), py::arg("h"), py::arg("u1"), py::arg("u2"));
  m.def("extremal_index_runs",
        [](const std::vector<double>& values, double threshold, int run_length) {
          const auto c = extremal_index_runs(values, threshold, run_length);
          py::dict d;
          d["threshold"] = c.threshold;
          d["run_length"] = c.run_length;
          d["clusters"] = c.clusters;
          d["exceedances"] = c.exceedances;
          d["theta"] = c.theta;
          return d;
        },
        py::arg("values"), py::arg("threshold"), py::arg("run_length") = 3);
  m.def("empirical_chi",
        [](const std::vector<double>& values, const std::vector<double>& levels, std::size_t lag) {
          std::vector<std::pair<double, double>> out;
          for (const auto& c : empirical_chi(values, levels, lag)) out.emplace_back(c.value, c.standard_error);
          return out;
        },
        py::arg("values"), py::arg("levels"), py::arg("lag"), "(value, standard error) per level.");

  m.def("read_csv",
        [](const std::string& path, const std::string& time, const std::string& value) {
          const auto raw = ingest_csv(path, {time, value});
          return py::make_tuple(to_array(raw.timestamps), to_array(raw.values));
        },
        py::arg("path"), py::arg("time") = "time", py::arg("value") = "value");
  m.def("quantile", &quantile_linear, py::arg("sample"), py::arg("p"));
}
