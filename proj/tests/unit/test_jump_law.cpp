#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tsou/jump_law.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/validation.hpp"

using namespace tsou;

namespace {

constexpr double kLambda = 1.0, kT = 0.1;

TsouModel tweedie(double alpha, double zeta, double w = 0.2) {
  return TsouModel(TsLaw(alpha, SphericalMeasure({{Direction({1.0}), w}}), Classical{{zeta}, 1.0}), kLambda);
}

TsouModel hardtrunc(double alpha, double gamma, double w = 0.2) {
  return TsouModel(
      TsLaw(alpha, SphericalMeasure({{Direction({-1.0}), w}, {Direction({1.0}), w}}), HardTruncation{{gamma}}),
      kLambda);
}

double f_integral(const JumpLaw& law, std::size_t k, double scale = 1.0) {
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-10;
  return quad::value_or_throw(quad::half_line([&](double u) { return law.pdf(k, u); }, opt, scale), "f");
}

}  // namespace

TEST_CASE("direction law") {
  const auto pt = JumpLaw::build(pt_model(PtParams(0.55, 1.0), kLambda), kT);
  REQUIRE(pt.directions().size() == 2);
  for (const auto& d : pt.directions()) CHECK(d.probability == doctest::Approx(0.5).epsilon(1e-12));

  const auto one = JumpLaw::build(tweedie(0.5, 1.0), kT);
  REQUIRE(one.directions().size() == 1);
  CHECK(one.directions()[0].probability == 1.0);

  const double r2 = std::sqrt(0.5);
  const PtMultivariate pm({Direction::normalized({r2, r2}), Direction::normalized({std::sqrt(0.75), 0.5}),
                           Direction::normalized({-r2, r2})},
                          PtParams(0.55, 1.0));
  const auto multi = JumpLaw::build(pt_multivariate_model(pm, kLambda), kT);
  REQUIRE(multi.directions().size() == 6);
  double total = 0;
  for (const auto& d : multi.directions()) {
    CHECK(d.probability == doctest::Approx(1.0 / 6).epsilon(1e-12));
    total += d.probability;
  }
  CHECK(std::fabs(total - 1) < 1e-12);

  const TsouModel stable(TsLaw(0.5, SphericalMeasure({{Direction({1.0}), 1.0}}), ConstantOne{}), kLambda);
  CHECK_THROWS_AS(JumpLaw::build(stable, kT), DomainError);
}

TEST_CASE("kappa and normalization") {
  const double a = 0.5, zeta = 1.7, g = std::expm1(a * kLambda * kT);
  const auto m = tweedie(a, zeta);
  const double kappa = kappa_xi(m, kT, Direction({1.0}));
  CHECK(kappa == doctest::Approx(a / (std::tgamma(1 - a) * g * std::pow(zeta, a))).epsilon(1e-12));
  const auto law = JumpLaw::build(m, kT);
  CHECK(f_integral(law, 0) == doctest::Approx(1).epsilon(1e-6));

  const PtParams p(0.55, 1.0);
  const auto ptm = pt_model(p, kLambda);
  const double K = compute_K(ptm, kT).value;
  const double frac = power_tempered_mixture(0.55, 1.0).fractional_moment(0.55);
  CHECK(kappa_xi(ptm, kT, Direction({1.0})) * K * frac == doctest::Approx(pt_levy_mass(p)).epsilon(1e-9));
  const auto ptl = JumpLaw::build(ptm, kT);
  CHECK(f_integral(ptl, 0) == doctest::Approx(1).epsilon(1e-6));
  CHECK(f_integral(ptl, 1) == doctest::Approx(1).epsilon(1e-6));

  const auto hl = JumpLaw::build(hardtrunc(0.5, 1.5), kT);
  quad::Options opt;
  opt.abs_tol = 1e-14;
  const double lo = 1.5 * std::exp(-kLambda * kT);
  CHECK(quad::value_or_throw(quad::finite([&](double u) { return hl.pdf(1, u); }, lo, 1.5, opt), "f") ==
        doctest::Approx(1).epsilon(1e-10));
}

TEST_CASE("hard truncation density support and inverse cdf") {
  const double gamma = 1.5, a = 0.5;
  const auto m = hardtrunc(a, gamma);
  const double lo = gamma * std::exp(-kLambda * kT);
  CHECK(f_xi_pdf(m, kT, Direction({1.0}), lo * 0.999) == 0);
  CHECK(f_xi_pdf(m, kT, Direction({1.0}), lo) == 0);
  CHECK(f_xi_pdf(m, kT, Direction({1.0}), gamma * 1.001) == 0);
  CHECK(f_xi_pdf(m, kT, Direction({1.0}), 0.5 * (lo + gamma)) > 0);

  CHECK(hardtrunc_quantile(0, gamma, a, kLambda, kT) == doctest::Approx(lo).epsilon(1e-15));
  CHECK(hardtrunc_quantile(1, gamma, a, kLambda, kT) == doctest::Approx(gamma).epsilon(1e-15));
  // e^{lambda t} = 2
  const double lt2 = std::log(2.0);
  const double expect = std::pow(std::sqrt(2.0) - (std::sqrt(2.0) - 1) / 2, -2.0);
  CHECK(expect == doctest::Approx(0.68629).epsilon(1e-5));
  CHECK(hardtrunc_quantile(0.5, 1.0, 0.5, 1.0, lt2) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(hardtrunc_cdf(expect, 1.0, 0.5, 1.0, lt2) == doctest::Approx(0.5).epsilon(1e-14));
  for (double y : linear_grid(0, 1, 1001))
    CHECK(std::fabs(hardtrunc_cdf(hardtrunc_quantile(y, gamma, a, kLambda, kT), gamma, a, kLambda, kT) - y) < 1e-12);

  RngStream r(11);
  std::vector<double> xs(100000);
  for (auto& x : xs) {
    x = hardtrunc_sample(gamma, a, kLambda, kT, r);
    REQUIRE(x > lo);
    REQUIRE(x <= gamma);
  }
  CHECK(ks_statistic(xs, [&](double x) { return hardtrunc_cdf(x, gamma, a, kLambda, kT); }) < 0.00516);
}

TEST_CASE("PT density against nested quadrature") {
  const double a = 0.55, ell = 1.0;
  const PtParams p(a, ell);
  const auto law = JumpLaw::build(pt_model(p, kLambda), kT);
  const double kappa = law.directions()[0].kappa;
  const double e = std::exp(kLambda * kT);
  quad::Options opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-12;
  for (double u : log_grid(1e-5, 1e2, 25)) {
    // q(u) - q(u e^{lambda t}) from the mixture density directly
    auto g = [&](double s) {
      return std::exp(-s * u) * -std::expm1(-s * u * (e - 1)) * std::pow(s, ell) * std::pow(1 + s, -2 - a - ell) / p.B;
    };
    const double num = quad::value_or_throw(quad::half_line(g, opt, 1.0 / u), "numerator");
    const double ref = kappa * num * std::pow(u, -1 - a);
    CHECK(std::fabs(law.pdf(0, u) / ref - 1) < 1e-6);
  }
}

TEST_CASE("envelope constants") {
  const auto pt = JumpLaw::build(pt_model(PtParams(0.55, 1.0), kLambda), kT);
  REQUIRE(pt.directions()[0].env1);
  CHECK(std::fabs(pt.directions()[0].env1->V - 12.8837) < 1e-3);
  CHECK_FALSE(pt.directions()[0].env2.has_value());
  CHECK(pt.directions()[0].method == RadialMethod::Algorithm1);

  const double a = 0.5;
  const double g = std::expm1(a * kLambda * kT), e1 = std::expm1(kLambda * kT);
  for (double zeta : {0.2, 1.0, 5.0, 30.0}) {
    const auto m = tweedie(a, zeta);
    const auto v1 = envelope_v1(m, kT, Direction({1.0}));
    CHECK(v1.V == doctest::Approx(std::max(1.0, zeta * e1) / (std::tgamma(2 - a) * g * std::sqrt(zeta))).epsilon(1e-10));
    const auto v2 = envelope_v2(m, kT, Direction({1.0}));
    REQUIRE(v2);
    CHECK(v2->V == doctest::Approx(a * e1 / g).epsilon(1e-10));
    CHECK(v2->V / v1.V <= std::pow(zeta, a - 1) * std::tgamma(2 - a) * a * (1 + 1e-12));
    const double threshold = std::pow(std::tgamma(2 - a) * a, 1 / (1 - a));
    if (zeta > threshold) CHECK(v2->V < v1.V);
  }
  CHECK(a * e1 / g == doctest::Approx(1.02564).epsilon(1e-5));
}

TEST_CASE("envelopes dominate") {
  const auto grid = log_grid(1e-6, 1e3, 512);
  const std::vector<TsouModel> models = {pt_model(PtParams(0.55, 1.0), kLambda), pt_model(PtParams(0.75, 10.0), kLambda),
                                         tweedie(0.5, 1.0), tweedie(0.3, 0.05)};
  for (const auto& m : models) {
    const auto law = JumpLaw::build(m, kT);
    for (std::size_t k = 0; k < law.directions().size(); ++k) {
      const auto& d = law.directions()[k];
      auto f = [&](double u) { return law.pdf(k, u); };
      const auto s1 = envelope_scan(f, d.env1->V, [&](double u) { return mll_pdf(u, d.env1->proposal); }, grid);
      CHECK(s1.worst_slack >= -1e-12);
      if (d.env2) {
        const auto s2 = envelope_scan(f, d.env2->V, [&](double u) { return gga_pdf(u, d.env2->proposal); }, grid);
        CHECK(s2.worst_slack >= -1e-12);
      }
      for (double u : grid) {
        const double p1 = law.phi1(k, u);
        CHECK(p1 >= 0);
        CHECK(p1 <= 1 + 1e-9);
        if (d.env2) CHECK(law.phi2(k, u) <= 1 + 1e-9);
      }
    }
  }
  const auto tw = JumpLaw::build(tweedie(0.5, 1.0), kT);
  CHECK(tw.phi2(0, 1e-9) == doctest::Approx(1).epsilon(1e-6));
}

TEST_CASE("MLL rejection acceptance rate") {
  const auto law = JumpLaw::build(pt_model(PtParams(0.55, 1.0), kLambda), kT);
  const double V = law.directions()[0].env1->V;
  RngStream r(12);
  const std::uint64_t n = 1000000;
  std::uint64_t acc = 0;
  for (std::uint64_t i = 0; i < n; ++i) acc += law.algorithm1_trial(0, r).has_value();
  const double rate = double(acc) / n, p = 1 / V;
  CHECK(std::fabs(rate - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("radial samplers match the density") {
  SUBCASE("PT, MLL rejection") {
    const auto law = JumpLaw::build(pt_model(PtParams(0.55, 1.0), kLambda), kT);
    const testing::TabulatedCdf F([&](double u) { return law.pdf(0, u); }, 1e-10, 1e8, 6000, law.cdf(0, 1e-10));
    CHECK(F.total() == doctest::Approx(1).epsilon(1e-6));
    RngStream r(13);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = law.algorithm1(0, r).value;
    CHECK(ks_statistic(xs, F) < 0.00516);
  }
  SUBCASE("Tweedie, both algorithms") {
    const auto law = JumpLaw::build(tweedie(0.5, 1.0), kT);
    RngStream r(14);
    std::vector<double> a(100000), b(100000);
    std::uint64_t it2 = 0;
    for (auto& x : a) x = law.algorithm1(0, r).value;
    for (auto& x : b) {
      const auto d = law.algorithm2(0, r);
      x = d.value;
      it2 += d.iterations;
    }
    CHECK(two_sample_ks(a, b) < 0.0073);
    const double p2 = 1 / law.directions()[0].env2->V;
    const double rate = double(b.size()) / double(it2);
    CHECK(std::fabs(rate - p2) < 4 * std::sqrt(p2 * (1 - p2) / double(it2)) + 1e-12);
  }
}

TEST_CASE("sampling from H") {
  const PtParams p(0.55, 1.0);
  const auto law = JumpLaw::build(pt_model(p, kLambda), kT);
  RngStream r(15);
  const int n = 1000000;
  int plus = 0;
  std::vector<double> signed_draws;
  signed_draws.reserve(100000);
  for (int i = 0; i < n; ++i) {
    const auto d = law.sample(r);
    REQUIRE(d.radius > 0);
    const double xi = law.directions()[d.index].direction[0];
    plus += xi > 0;
    if (i < 100000) signed_draws.push_back(xi * d.radius);
  }
  CHECK(std::fabs(plus / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));
  const testing::TabulatedCdf F([&](double u) { return law.pdf(0, u); }, 1e-10, 1e8, 6000, law.cdf(0, 1e-10));
  auto symmetric = [&](double x) { return x >= 0 ? 0.5 + 0.5 * F(x) : 0.5 - 0.5 * F(-x); };
  CHECK(ks_statistic(signed_draws, symmetric) < 0.00516);
}
