#include "tsou/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "tsou/base_increment.hpp"
#include "tsou/cli_runner.hpp"
#include "tsou/dist_basic.hpp"
#include "tsou/jump_law.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/ou_transition.hpp"
#include "tsou/validation.hpp"

namespace tsou {

namespace {

// Tolerances that do not scale with the sample size.
constexpr double kV1Target = 12.8837;
constexpr double kV1Tolerance = 1e-3;
constexpr double kV1Seconds = 1.0;
constexpr double kAcceptSigmas = 4.0;
constexpr double kKRelTol = 1e-6;
constexpr double kGammaIdentityRelTol = 1e-8;
constexpr double kNormTol = 1e-6;
constexpr double kEnvelopeRelSlack = -1e-12;
constexpr double kRoundtripTol = 1e-12;

// Shared test models: lambda = 1, t = 0.1.
constexpr double kLambda = 1.0;
constexpr double kStep = 0.1;

PtParams pt_reference_params() { return PtParams(0.55, 1.0, 1.0); }

ModelConfig tweedie_config() {
  ModelConfig m;
  m.preset = "tweedie";
  m.alpha = 0.5;
  m.zeta = 1.0;
  m.weight = 0.2;
  return m;
}

ModelConfig hardtrunc_config() {
  ModelConfig m;
  m.preset = "hard-trunc";
  m.alpha = 0.5;
  m.gamma = 1.0;
  m.weight = 0.2;
  return m;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CheckResult make(int id, std::string name, bool pass, double value, double threshold, std::string detail,
                 const Timer& timer) {
  return {id, std::move(name), pass, value, threshold, std::move(detail), timer.seconds()};
}

unsigned worker_count(const SuiteProfile& p) {
  return p.threads > 0 ? p.threads : std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

SuiteProfile SuiteProfile::quick() {
  return {"quick", 1'000'000, 20'000, 4 / std::sqrt(2e4), 100, 0.17, 20'000, 0.0163, 20'000, 0.0115};
}

SuiteProfile SuiteProfile::ci() {
  return {"ci", 10'000'000, 100'000, 0.0127, 500, 0.08, 100'000, 0.0073, 100'000, 0.00516};
}

SuiteProfile SuiteProfile::full() {
  SuiteProfile p = ci();
  p.name = "full";
  p.stationarity_paths = 3000;
  p.stationarity_threshold = 0.035;
  return p;
}

SuiteProfile SuiteProfile::by_name(const std::string& name) {
  if (name == "quick") return quick();
  if (name == "ci") return ci();
  if (name == "full") return full();
  throw ConfigError("unknown suite profile '" + name + "' (expected quick, ci or full)");
}

CheckResult check_v1_reproduction() {
  Timer timer;
  const double v1 = pt_v1(pt_reference_params(), kLambda, kStep);
  // the generic construction must agree with the specialised formula
  const auto generic = JumpLaw::build(pt_model(pt_reference_params(), kLambda), kStep);
  const double v1g = generic.directions().front().env1->V;
  const double err = std::max(std::fabs(v1 - kV1Target), std::fabs(v1g - kV1Target));
  const double secs = timer.seconds();
  return make(1, "V1 reproduction", err <= kV1Tolerance && secs < kV1Seconds, err, kV1Tolerance,
              fmt("V1 = %.6f (generic %.6f), target %.4f, %.3f s", v1, v1g, kV1Target, secs), timer);
}

CheckResult check_acceptance_count(const SuiteProfile& p) {
  Timer timer;
  const auto law = pt_jumplaw(pt_reference_params(), kLambda, kStep);
  RngStream rng(p.seed, 2);
  std::uint64_t accepted = 0;
  for (std::uint64_t i = 0; i < p.accept_trials; ++i)
    if (law.algorithm1_trial(0, rng)) ++accepted;
  const double n = static_cast<double>(p.accept_trials);
  const double r = 1.0 / kV1Target;
  const double bound = kAcceptSigmas * std::sqrt(r * (1 - r) / n);
  const double dev = std::fabs(static_cast<double>(accepted) / n - r);
  return make(2, "acceptance count", dev <= bound, dev, bound,
              fmt("%llu of %llu accepted (expected %.1f)", static_cast<unsigned long long>(accepted),
                  static_cast<unsigned long long>(p.accept_trials), n * r),
              timer);
}

CheckResult check_k_closed_form() {
  Timer timer;
  double worst = 0;
  std::string where;
  for (double a : {0.3, 0.55, 0.75}) {
    const PtParams pt(a, 1.0, 1.0);
    for (double p : {1.0, 2.0}) {
      auto R = pt_rosinski(pt);
      const RosinskiMeasure Rp(a, p, R.radials());
      const auto dec = decompose_rosinski(Rp);
      const TsLaw law(a, dec.sigma, PTemperedMixture{dec.mixtures, p});
      for (double lt : {0.05, 0.1, 0.5}) {
        const TsouModel model(law, 1.0);
        const double Kq = compute_K_quadrature(model, lt);
        // p = 1 reduces to 2c(e^{alpha lambda t} - 1)
        const double ref = p == 1.0 ? 2 * pt.c * std::expm1(a * lt)
                                    : pt_levy_mass(pt) / a * std::tgamma(1 - a / p) * std::expm1(a * lt);
        const double rel = std::fabs(Kq - ref) / ref;
        if (rel > worst) {
          worst = rel;
          where = fmt("alpha=%g p=%g lt=%g", a, p, lt);
        }
      }
    }
  }
  return make(3, "K closed form vs quadrature", worst < kKRelTol, worst, kKRelTol,
              "18-point grid, worst at " + where, timer);
}

CheckResult check_gamma_identity_grid() {
  Timer timer;
  double worst = 0;
  std::string where;
  quad::Options opt;
  opt.abs_tol = 0;
  opt.rel_tol = 1e-12;
  for (double a : {0.25, 0.8, 1.5}) {
    for (double pm : {1.5, 2.5, 4.0}) {
      const double p = a * pm;
      for (double kappa : {1.5, 4.0, 20.0}) {
        auto f = [&](double u) {
          const double up = std::pow(u, p);
          return std::exp(-up) * -std::expm1(-up * (kappa - 1)) * std::pow(u, -1 - a);
        };
        const double q = quad::value_or_throw(quad::half_line(f, opt, 1.0), "exponential-difference oracle");
        const double c = lemma3_integral(a, p, kappa);
        const double rel = std::fabs(c - q) / q;
        if (rel > worst) {
          worst = rel;
          where = fmt("alpha=%g p=%g kappa=%g", a, p, kappa);
        }
      }
    }
  }
  return make(4, "exponential-difference integral", worst < kGammaIdentityRelTol, worst, kGammaIdentityRelTol, "27-point grid, worst at " + where,
              timer);
}

CheckResult check_fxi_normalization() {
  Timer timer;
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  double worst = 0;
  std::string detail;
  const std::pair<const char*, TsouModel> models[] = {
      {"PT", pt_model(pt_reference_params(), kLambda)},
      {"Tweedie", build_model(tweedie_config(), kLambda)},
      {"hard-trunc", build_model(hardtrunc_config(), kLambda)},
  };
  for (const auto& [name, model] : models) {
    const auto law = JumpLaw::build(model, kStep);
    for (std::size_t k = 0; k < law.directions().size(); ++k) {
      auto f = [&](double u) { return law.pdf(k, u); };
      double total;
      if (law.directions()[k].method == RadialMethod::InverseCdf) {
        const double g = model.law.tempering.hard_gamma(law.directions()[k].atom);
        total = quad::value_or_throw(quad::finite(f, g * std::exp(-kLambda * kStep), g, opt), "f_xi mass");
      } else {
        total = quad::value_or_throw(quad::half_line(f, opt, 1.0), "f_xi mass");
      }
      const double err = std::fabs(total - 1);
      worst = std::max(worst, err);
      detail += fmt("%s[%zu]=%.12f ", name, k, total);
    }
  }
  return make(5, "f_xi normalization", worst < kNormTol, worst, kNormTol, detail, timer);
}

CheckResult check_envelope_domination() {
  Timer timer;
  const auto grid = log_grid(1e-6, 1e3, 512);
  double worst = std::numeric_limits<double>::infinity();
  std::string detail;
  auto scan = [&](const char* name, const JumpLaw& law, std::size_t k, bool second) {
    const auto& d = law.directions()[k];
    std::function<double(double)> g;
    double V;
    if (second) {
      const auto e = *d.env2;
      g = [e](double u) { return gga_pdf(u, e.proposal); };
      V = e.V;
    } else {
      const auto e = *d.env1;
      g = [e](double u) { return mll_pdf(u, e.proposal); };
      V = e.V;
    }
    // slack relative to the envelope value, i.e. min (V g - f) / (V g)
    // where both underflow there is nothing to dominate; a zero envelope under
    // a positive density is an infinite violation
    auto f = [&](double u) {
      const double fu = law.pdf(k, u);
      if (fu == 0) return 0.0;
      const double env = V * g(u);
      return env > 0 ? fu / env : std::numeric_limits<double>::infinity();
    };
    const auto r = envelope_scan(f, 1.0, [](double) { return 1.0; }, grid);
    if (!(r.worst_slack >= worst)) worst = r.worst_slack;  // keeps a NaN
    detail += fmt("%s/%s V=%.6g slack=%.3g@%.3g ", name, second ? "V2" : "V1", V, r.worst_slack, r.worst_u);
  };
  const auto pt = pt_jumplaw(pt_reference_params(), kLambda, kStep);
  scan("PT", pt, 0, false);
  const auto tw = JumpLaw::build(build_model(tweedie_config(), kLambda), kStep);
  scan("Tweedie", tw, 0, false);
  if (!tw.directions()[0].env2) throw NumericError("Tweedie model has no V2 envelope");
  scan("Tweedie", tw, 0, true);
  return make(6, "envelope domination", worst >= kEnvelopeRelSlack, worst, kEnvelopeRelSlack, detail, timer);
}

CheckResult check_cf_crosscheck(const SuiteProfile& p) {
  Timer timer;
  const auto zs = log_grid(0.1, 20.0, 20);
  struct Case {
    const char* name;
    TsouModel model;
    double y;
  };
  const Case cases[] = {
      {"PT", pt_model(pt_reference_params(), kLambda), 0.0},
      {"Tweedie", build_model(tweedie_config(), kLambda), 0.5},
      {"hard-trunc", build_model(hardtrunc_config(), kLambda), -0.5},
  };
  double worst = 0;
  std::string detail;
  std::uint64_t stream = 100;
  for (const auto& c : cases) {
    const TransitionSampler sampler(c.model, kStep);
    const std::vector<double> y{c.y};
    std::vector<double> xs(p.cf_samples);
    parallel_for(p.cf_samples, worker_count(p), [&](std::size_t i) {
      RngStream rng(p.seed + stream, i);
      xs[i] = sampler.sample(y, rng)[0];
    });
    ++stream;
    const auto model = c.model;
    CfHandle cf;
    cf.cf = [&model, &y](std::span<const double> z) { return transition_cf(model, y, z, kStep); };
    const double d = ecf_distance(xs, cf, zs);
    worst = std::max(worst, d);
    detail += fmt("%s=%.5f ", c.name, d);
  }
  return make(7, "transition CF vs sampled increments", worst < p.cf_threshold, worst, p.cf_threshold,
              detail + fmt("(n=%llu each, 20 z-points)", static_cast<unsigned long long>(p.cf_samples)), timer);
}

CheckResult check_stationarity(const SuiteProfile& p) {
  Timer timer;
  const auto pt = pt_reference_params();
  const TransitionSampler sampler(pt_model(pt, kLambda), kStep);
  const std::size_t steps = 1000;  // T = 100
  std::vector<double> terminal(p.stationarity_paths);
  const std::vector<double> y0{0.0};
  parallel_for(p.stationarity_paths, worker_count(p), [&](std::size_t i) {
    RngStream rng(p.seed + 7, i);
    std::vector<double> y = y0;
    for (std::size_t k = 0; k < steps; ++k) y = sampler.sample(y, rng);
    terminal[i] = y[0];
  });
  double xm = 1;
  for (double x : terminal) xm = std::max(xm, std::fabs(x));
  InversionOptions opt;
  opt.x_max = std::ceil(xm);
  const PtReferenceDensity ref(pt, opt);
  const double D = ks_statistic(terminal, [&](double x) { return ref.cdf(x); });
  return make(8, "stationarity (terminal states vs limit law)", D < p.stationarity_threshold, D,
              p.stationarity_threshold,
              fmt("%llu paths to T=100, KS D=%.4f, Z*=%g", static_cast<unsigned long long>(p.stationarity_paths), D,
                  ref.inverter().z_star()),
              timer);
}

CheckResult check_base_equivalence(const SuiteProfile& p) {
  Timer timer;
  const double a = 0.5, zeta = 1.0, w = 0.05;
  const TsLaw law(a, SphericalMeasure({{Direction({1.0}), w}}), Classical{{zeta}, 1.0});
  const SeriesThinningSampler series(make_base_spec(law, 1e-8, true));
  std::vector<double> xs(p.base_samples), ys(p.base_samples);
  parallel_for(p.base_samples, worker_count(p), [&](std::size_t i) {
    RngStream r1(p.seed + 9, i), r2(p.seed + 10, i);
    xs[i] = series.sample(r1)[0];
    ys[i] = esscher_tweedie_sample(a, zeta, w, r2);
  });
  const double D = two_sample_ks(xs, ys);
  return make(9, "series thinning vs Esscher oracle", D < p.base_threshold, D, p.base_threshold,
              fmt("Tweedie alpha=%g zeta=%g w=%g, n=%llu each", a, zeta, w,
                  static_cast<unsigned long long>(p.base_samples)),
              timer);
}

CheckResult check_analytic_samplers(const SuiteProfile& p) {
  Timer timer;
  const MllParams mll(0.55, 1.0, 1.0);
  const GgaParams gga(0.5, 1.0, 1.0);
  std::vector<double> a(p.sampler_samples), b(p.sampler_samples);
  RngStream r1(p.seed + 11, 0), r2(p.seed + 12, 0);
  for (auto& v : a) v = mll_sample(mll, r1);
  for (auto& v : b) v = gga_sample(gga, r2);
  const double Dm = ks_statistic(a, [&](double x) { return mll_cdf(x, mll); });
  const double Dg = ks_statistic(b, [&](double x) { return gga_cdf(x, gga); });
  double rt = 0;
  for (int i = 1; i < 1000; ++i) {
    const double y = i / 1000.0;
    const double x = hardtrunc_quantile(y, 1.0, 0.5, kLambda, kStep);
    rt = std::max(rt, std::fabs(hardtrunc_cdf(x, 1.0, 0.5, kLambda, kStep) - y));
  }
  const bool pass = Dm < p.sampler_threshold && Dg < p.sampler_threshold && rt < kRoundtripTol;
  return make(10, "samplers vs analytic laws", pass, std::max(Dm, Dg), p.sampler_threshold,
              fmt("MLL(0.55,1,1) D=%.5f, GGa(0.5,1,1) D=%.5f, hard-trunc roundtrip %.2e (tol %.0e)", Dm, Dg, rt,
                  kRoundtripTol),
              timer);
}

CheckResult check_determinism(const SuiteProfile& p) {
  Timer timer;
  const TransitionSampler sampler(pt_model(pt_reference_params(), kLambda), kStep);
  const std::vector<double> y0{0.0};
  std::string first;
  bool same = true;
  for (unsigned threads : {1u, 4u, 8u}) {
    const auto paths = simulate_paths(sampler, y0, 100, 16, p.seed, threads);
    std::ostringstream os;
    write_paths_csv(os, paths);
    if (first.empty()) {
      first = os.str();
    } else if (os.str() != first) {
      same = false;
    }
  }
  return make(11, "determinism across thread counts", same, same ? 0.0 : 1.0, 0.0,
              fmt("16 paths x 100 steps, threads 1/4/8, %zu bytes", first.size()), timer);
}

std::vector<CheckResult> run_suite(const SuiteProfile& p, const std::function<void(const CheckResult&)>& on_result) {
  using Fn = std::function<CheckResult()>;
  const std::pair<int, Fn> checks[] = {
      {1, [] { return check_v1_reproduction(); }},
      {2, [&] { return check_acceptance_count(p); }},
      {3, [] { return check_k_closed_form(); }},
      {4, [] { return check_gamma_identity_grid(); }},
      {5, [] { return check_fxi_normalization(); }},
      {6, [] { return check_envelope_domination(); }},
      {7, [&] { return check_cf_crosscheck(p); }},
      {8, [&] { return check_stationarity(p); }},
      {9, [&] { return check_base_equivalence(p); }},
      {10, [&] { return check_analytic_samplers(p); }},
      {11, [&] { return check_determinism(p); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [id, fn] : checks) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "check " + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  return fmt("%s %2d %-40s value=%-12.6g threshold=%-10.4g %7.2fs  %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
             r.value, r.threshold, r.seconds, r.detail.c_str());
}

}  // namespace tsou
