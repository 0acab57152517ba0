#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsou/base_increment.hpp"
#include "tsou/levy_integrals.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/quadrature.hpp"
#include "tsou/validation.hpp"

using namespace tsou;

namespace {

SphericalMeasure one_sided(double w) { return SphericalMeasure({{Direction({1.0}), w}}); }

// int_x^inf g(u) w u^{-1-alpha} du
double tail_mass(const std::function<double(double)>& g, double w, double a, double x) {
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  auto f = [&](double u) { return g(u) * w * std::pow(u, -1 - a); };
  return quad::value_or_throw(quad::half_line(f, opt, std::max(x, 1.0), x), "tail mass");
}

}  // namespace

TEST_CASE("truncation error bound") {
  const TsLaw law(0.5, one_sided(1.0), ConstantOne{});
  BaseIncrementSpec spec{law, 1e-8, false};
  CHECK(truncation_error_bound(spec) == doctest::Approx(2e-4).epsilon(1e-12));
  BaseIncrementSpec half{law, 0.5e-8, false};
  CHECK(truncation_error_bound(half) / truncation_error_bound(spec) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
  // shrinking eps shrinks the bound
  double prev = INFINITY;
  auto eps = log_grid(1e-12, 1, 20);
  std::reverse(eps.begin(), eps.end());
  for (double e : eps) {
    BaseIncrementSpec s{law, e, false};
    const double b = truncation_error_bound(s);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(error_measure(make_base_spec(law, 1e-8, true)) <= 1e-8);
  CHECK(error_measure(make_base_spec(law, 1e-8, false)) <= 1e-8);
  CHECK(error_measure(make_base_spec(law, 1e-8, true)) == doctest::Approx(1e-8).epsilon(1e-9));
}

TEST_CASE("configuration errors") {
  const TsLaw wide(1.2, one_sided(1.0), Classical{{1.0}, 2.0});
  CHECK_THROWS_AS(SeriesThinningSampler(BaseIncrementSpec{wide, 1e-6, true}), UnsupportedRegime);
  const TsLaw law(0.5, one_sided(1.0), ConstantOne{});
  CHECK_THROWS_AS(SeriesThinningSampler(BaseIncrementSpec{law, 1e-2, false, 1e-8}), ConfigError);
  CHECK_THROWS_AS(SeriesThinningSampler(BaseIncrementSpec{law, 0.0, false}), ConfigError);
}

TEST_CASE("untempered series is one-sided stable") {
  for (auto [a, n] : {std::pair{0.3, 1000000}, std::pair{0.6, 100000}}) {
    const double w = 0.7;
    const SeriesThinningSampler s(make_base_spec(TsLaw(a, one_sided(w), ConstantOne{}), 1e-4));
    RngStream r(21);
    std::vector<double> xs(n);
    for (auto& x : xs) x = s.sample(r)[0];
    for (double l : {0.5, 1.0, 2.0}) {
      double m = 0, m2 = 0;
      for (double x : xs) {
        const double e = std::exp(-l * x);
        m += e;
        m2 += e * e;
      }
      m /= n;
      const double se = std::sqrt((m2 / n - m * m) / n);
      CHECK(std::fabs(m - std::exp(w * std::tgamma(-a) * std::pow(l, a))) < 4 * se);
    }
  }
}

TEST_CASE("kept and thinned counts are Poisson with the right means") {
  const double a = 0.55, x = 0.05;
  const PtParams p(a, 1.0, 1 - std::exp(-0.055));
  const TsLaw law = pt_build(p);
  const SeriesThinningSampler s(make_base_spec(law, 1e-6), x);
  const int n = 10000;
  RngStream r(22);
  std::vector<double> kept(n), thin(n);
  double thin_all = 0;
  for (int i = 0; i < n; ++i) {
    SeriesDiagnostics d;
    s.sample(r, &d);
    kept[i] = double(d.kept_above);
    thin[i] = double(d.thinned_above);
    thin_all += double(d.thinned);
  }
  const auto& tq = law.tempering;
  double mk = 0, mt = 0;
  for (std::size_t k = 0; k < law.sigma.size(); ++k) {
    const double w = law.sigma[k].weight;
    mk += tail_mass([&](double u) { return tq.q(k, u); }, w, a, x);
    mt += tail_mass([&](double u) { return tq.q_complement(k, u); }, w, a, x);
  }
  auto check_poisson = [&](const std::vector<double>& c, double mean) {
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / n;
    double v = 0;
    for (double y : c) v += (y - m) * (y - m);
    v /= n - 1;
    CHECK(std::fabs(m - mean) < 4 * std::sqrt(mean / n));
    // dispersion index: sd of the sample variance is about sqrt(2/n) mean for Poisson
    CHECK(std::fabs(v / m - 1) < 5 * std::sqrt(2.0 / n) + 1 / std::sqrt(mean * n) * 5);
  };
  check_poisson(kept, mk);
  check_poisson(thin, mt);
  // all thinned jumps: eta_0 = 2 c (1 - e^{-alpha lambda t}) in the limit eps -> 0
  const double eta0 = 2 * p.c;
  CHECK(std::fabs(thin_all / n - eta0) < 4 * std::sqrt(eta0 / n));
  CHECK(eta0 == doctest::Approx(std::tgamma(1 - a) / a * pt_levy_mass(p)).epsilon(1e-12));
}

TEST_CASE("monotone coupling in the cutoff") {
  const TsLaw law(0.5, one_sided(0.3), Classical{{1.0}, 1.0});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    double prev = -1;
    for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
      const SeriesThinningSampler s(BaseIncrementSpec{law, eps, false});
      RngStream r(seed);
      const double x = s.sample(r)[0];
      CHECK(x >= prev);
      prev = x;
    }
  }
}

TEST_CASE("Esscher sampler") {
  const double a = 0.5, w = 0.05;
  RngStream r(23);
  std::uint64_t it = 0;
  for (int i = 0; i < 1000; ++i) {
    esscher_tweedie_sample(a, 0.0, w, r, &it);
    CHECK(it == 1);
  }
  const double zeta = 1.0;
  const int n = 1000000;
  std::uint64_t total = 0;
  for (int i = 0; i < n; ++i) {
    esscher_tweedie_sample(a, zeta, w, r, &it);
    total += it;
  }
  // n accepted out of `total` proposals
  const double p = std::exp(w * std::tgamma(-a) * std::pow(zeta, a));
  CHECK(std::fabs(double(n) / double(total) - p) < 4 * std::sqrt(p * (1 - p) / double(total)));
}

TEST_CASE("series sampler agrees with the Esscher oracle") {
  const double a = 0.5, zeta = 1.0, w = 0.05;
  const SeriesThinningSampler s(make_base_spec(TsLaw(a, one_sided(w), Classical{{zeta}, 1.0}), 1e-8));
  const int n = 20000;
  RngStream r1(24), r2(25);
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = s.sample(r1)[0];
  for (auto& v : y) v = esscher_tweedie_sample(a, zeta, w, r2);
  CHECK(two_sample_ks(x, y) < ks_critical(n / 2.0));
}

TEST_CASE("series sampler matches the TS characteristic function") {
  const PtParams p(0.55, 1.0, 1 - std::exp(-0.055));
  const TsLaw law = pt_build(p);
  const SeriesThinningSampler s(make_base_spec(law, 1e-8));
  const int n = 20000;
  RngStream r(26);
  std::vector<double> xs(n);
  for (auto& v : xs) v = s.sample(r)[0];
  const auto cf = CfHandle::univariate([&](double z) {
    const double zz[1] = {z};
    return std::exp(ts_log_cf(law, zz));
  });
  CHECK(ecf_distance(xs, cf, log_grid(0.1, 20, 20)) < 4 / std::sqrt(double(n)));
}
