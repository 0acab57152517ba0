#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tsou/cli_runner.hpp"
#include "tsou/dist_basic.hpp"
#include "tsou/error.hpp"
#include "tsou/jump_law.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/ou_transition.hpp"
#include "tsou/suite.hpp"

namespace py = pybind11;
using namespace tsou;

namespace {

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

std::vector<double> state_or_origin(const TsouModel& m, std::optional<std::vector<double>> y) {
  if (!y) return std::vector<double>(m.dimension(), 0.0);
  if (y->size() != m.dimension()) throw DomainError("state has the wrong dimension");
  return *y;
}

// n draws of X_t given X_0 = y as an (n, d) array; draw i uses stream i.
py::array_t<double> sample_many(const TransitionSampler& s, std::optional<std::vector<double>> y, std::size_t n,
                                std::uint64_t seed, unsigned threads) {
  const auto y0 = state_or_origin(s.model(), std::move(y));
  const std::size_t d = s.dimension();
  py::array_t<double> out({n, d});
  double* p = out.mutable_data();
  {
    py::gil_scoped_release release;
    parallel_for(n, threads, [&](std::size_t i) {
      RngStream rng(seed, i);
      const auto x = s.sample(y0, rng);
      std::copy(x.begin(), x.end(), p + i * d);
    });
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact simulation of tempered stable Ornstein-Uhlenbeck processes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<TsouModel>(m, "Model")
      .def_property_readonly("alpha", &TsouModel::alpha)
      .def_property_readonly("dimension", &TsouModel::dimension)
      .def_readonly("lam", &TsouModel::lambda)
      .def("__repr__", [](const TsouModel& x) {
        std::ostringstream os;
        os << "Model(alpha=" << x.alpha() << ", dimension=" << x.dimension() << ", lam=" << x.lambda << ")";
        return os.str();
      });

  m.def("pt_model", [](double alpha, double ell, double c, double lam) { return pt_model(PtParams(alpha, ell, c), lam); },
        py::arg("alpha"), py::arg("ell") = 1.0, py::arg("c") = 1.0, py::arg("lam") = 1.0,
        "Univariate OU process with PT_alpha(ell, c) stationary law.");
  m.def(
      "preset_model",
      [](const std::string& json_model, double lam) {
        // reuse the CLI parser so presets and validation stay in one place
        const auto cfg = config_from_json("{\"model\": " + json_model + "}");
        return build_model(cfg.model, lam);
      },
      py::arg("model_json") = "{}", py::arg("lam") = 1.0,
      "Model from a JSON object with the CLI's model keys (preset, alpha, ell, c, zeta, gamma, ...).");

  m.def(
      "transition_cf",
      [](const TsouModel& model, std::vector<double> y, std::vector<double> z, double t) {
        return transition_cf(model, y, z, t);
      },
      py::arg("model"), py::arg("y"), py::arg("z"), py::arg("t"));
  m.def("limit_cf", [](const TsouModel& model, std::vector<double> z) { return limit_cf(model, z); }, py::arg("model"),
        py::arg("z"));
  m.def(
      "poisson_mean", [](const TsouModel& model, double t) { return transition_params(model, t).poisson_mean; },
      py::arg("model"), py::arg("t"));

  py::class_<TransitionSampler>(m, "Sampler")
      .def(py::init([](const TsouModel& model, double t, double trunc_tolerance, bool tail_compensation) {
             return TransitionSampler(model, t, {trunc_tolerance, tail_compensation});
           }),
           py::arg("model"), py::arg("t"), py::arg("trunc_tolerance") = 1e-8, py::arg("tail_compensation") = true)
      .def("sample", &sample_many, py::arg("y") = py::none(), py::arg("n") = 1, py::arg("seed") = 1,
           py::arg("threads") = 1, "Draws n transitions from y; returns an (n, d) array.")
      .def_property_readonly("dimension", &TransitionSampler::dimension);

  m.def(
      "simulate_paths",
      [](const TsouModel& model, double t, std::size_t n_steps, std::size_t n_paths,
         std::optional<std::vector<double>> y0, std::uint64_t seed, unsigned threads, double trunc_tolerance) {
        const auto y = state_or_origin(model, std::move(y0));
        std::vector<PathRecord> paths;
        {
          py::gil_scoped_release release;
          const TransitionSampler s(model, t, {trunc_tolerance, true});
          paths = simulate_paths(s, y, n_steps, n_paths, seed, threads);
        }
        const std::size_t d = model.dimension();
        py::array_t<double> out({n_paths, n_steps + 1, d});
        double* p = out.mutable_data();
        for (const auto& rec : paths)
          for (const auto& x : rec.states) p = std::copy(x.begin(), x.end(), p);
        return out;
      },
      py::arg("model"), py::arg("t"), py::arg("n_steps"), py::arg("n_paths") = 1, py::arg("y0") = py::none(),
      py::arg("seed") = 1, py::arg("threads") = 1, py::arg("trunc_tolerance") = 1e-8,
      "Returns an (n_paths, n_steps + 1, d) array; path i uses stream i.");

  m.def(
      "f_xi_pdf",
      [](const TsouModel& model, double t, std::vector<double> xi,
         py::array_t<double, py::array::c_style | py::array::forcecast> u) {
        const Direction dir(std::move(xi));
        return py::vectorize([&](double v) { return f_xi_pdf(model, t, dir, v); })(u);
      },
      py::arg("model"), py::arg("t"), py::arg("xi"), py::arg("u"));
  m.def("pt_v1", [](double alpha, double ell, double lam, double t) { return pt_v1(PtParams(alpha, ell), lam, t); },
        py::arg("alpha"), py::arg("ell"), py::arg("lam"), py::arg("t"));
  m.def(
      "pt_density",
      [](double alpha, double ell, double c, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        const auto xs = as_vector(x);
        double x_max = 10;
        for (double v : xs) x_max = std::max(x_max, std::ceil(std::fabs(v)));
        InversionOptions opt;
        opt.x_max = x_max;
        const PtReferenceDensity ref(PtParams(alpha, ell, c), opt);
        py::array_t<double> out(xs.size());
        const auto d = ref.inverter().density(xs);
        std::copy(d.begin(), d.end(), out.mutable_data());
        return out;
      },
      py::arg("alpha"), py::arg("ell"), py::arg("c"), py::arg("x"), "PT_alpha(ell, c) density by CF inversion.");

  m.def(
      "mll_pdf",
      [](double alpha, double p, double delta, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        const MllParams mp(alpha, p, delta);
        return py::vectorize([&](double v) { return mll_pdf(v, mp); })(x);
      },
      py::arg("alpha"), py::arg("p"), py::arg("delta"), py::arg("x"));
  m.def(
      "mll_sample",
      [](double alpha, double p, double delta, std::size_t n, std::uint64_t seed) {
        const MllParams mp(alpha, p, delta);
        RngStream rng(seed);
        py::array_t<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out.mutable_data()[i] = mll_sample(mp, rng);
        return out;
      },
      py::arg("alpha"), py::arg("p"), py::arg("delta"), py::arg("n"), py::arg("seed") = 1);

  m.def(
      "run_suite",
      [](const std::string& profile, unsigned threads) {
        auto p = SuiteProfile::by_name(profile);
        p.threads = threads;
        std::vector<py::dict> rows;
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_suite(p);
        }
        for (const auto& r : results)
          rows.push_back(py::dict(py::arg("id") = r.id, py::arg("name") = r.name, py::arg("passed") = r.pass,
                                  py::arg("value") = r.value, py::arg("threshold") = r.threshold,
                                  py::arg("detail") = r.detail));
        return rows;
      },
      py::arg("profile") = "quick", py::arg("threads") = 1);

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config_json) {
        const auto cfg = config_from_json(config_json);
        std::ostringstream log;
        int rc;
        {
          py::gil_scoped_release release;
          rc = run(subcommand, cfg, log);
        }
        return py::make_tuple(rc, log.str());
      },
      py::arg("subcommand"), py::arg("config_json") = "{}",
      "Runs a CLI subcommand in-process; returns (exit_code, log).");
}
