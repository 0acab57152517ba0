#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tsou/dist_basic.hpp"
#include "tsou/error.hpp"
#include "tsou/rng.hpp"
#include "tsou/validation.hpp"

using namespace tsou;

namespace {

CfHandle gamma2_cf() {
  return CfHandle::univariate([](double z) { return std::pow(cplx(1.0, -z), -2.0); }, 2.0);
}

CfHandle normal_cf() {
  return CfHandle::univariate([](double z) { return cplx(std::exp(-0.5 * z * z), 0.0); }, 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

TEST_CASE("inversion recovers the gamma(2,1) density") {
  InversionOptions opt;
  opt.x_max = 20;
  CfInverter inv(gamma2_cf(), opt);
  double worst = 0;
  for (double x : linear_grid(0.05, 15, 120)) worst = std::max(worst, std::abs(inv.density(x) - x * std::exp(-x)));
  CHECK(worst < 1e-6);
  // Gil-Pelaez cdf, 1 - (1+x)e^{-x}
  for (double x : {0.5, 1.0, 3.0, 8.0}) CHECK(inv.cdf(x) == doctest::Approx(1 - (1 + x) * std::exp(-x)).epsilon(1e-6));
}

TEST_CASE("inversion recovers the standard normal") {
  CfInverter inv(normal_cf());
  double worst_pdf = 0, worst_cdf = 0;
  for (double x : linear_grid(-8, 8, 161)) {
    worst_pdf = std::max(worst_pdf, std::abs(inv.density(x) - normal_pdf(x)));
    worst_cdf = std::max(worst_cdf, std::abs(inv.cdf(x) - normal_cdf(x)));
  }
  CHECK(worst_pdf < 1e-8);
  CHECK(worst_cdf < 1e-8);
  CHECK_THROWS_AS(inv.density(inv.x_max() * 1.5), DomainError);
}

TEST_CASE("inversion is linear in the characteristic function") {
  // the mixture 0.3 N(0,1) + 0.7 Ga(2,1) must invert to the same mixture of densities
  auto g = gamma2_cf();
  auto n = normal_cf();
  auto mix = CfHandle::univariate([&](double z) { return 0.3 * n(z) + 0.7 * g(z); }, 2.0);
  InversionOptions opt;
  opt.x_max = 20;
  const auto xs = linear_grid(-3, 10, 53);
  const auto a = cf_invert(mix, xs, opt);
  const auto b = cf_invert(n, xs, opt);
  const auto c = cf_invert(g, xs, opt);
  double worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(a[i] - (0.3 * b[i] + 0.7 * c[i])));
  CHECK(worst < 1e-9);
}

TEST_CASE("ks statistic of uniforms stays below the critical value") {
  RngStream rng(11);
  std::vector<double> u(20000);
  for (auto& x : u) x = rng.uniform();
  const double d = ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(d < ks_critical(u.size()));
  CHECK(d > 0);
  // a shifted law is rejected
  CHECK(ks_statistic(u, [](double x) { return std::clamp(x - 0.05, 0.0, 1.0); }) > ks_critical(u.size()));
}

TEST_CASE("two-sample ks of identical arrays is zero") {
  RngStream rng(12);
  std::vector<double> a(500);
  for (auto& x : a) x = rng.normal();
  CHECK(two_sample_ks(a, a) == 0.0);
  std::vector<double> b(a.rbegin(), a.rend());
  CHECK(two_sample_ks(a, b) == 0.0);
}

TEST_CASE("ks needs at least ten samples") {
  std::vector<double> few(5, 0.5);
  CHECK_THROWS(ks_statistic(few, [](double x) { return x; }));
}

TEST_CASE("ecf of poisson draws matches its characteristic function") {
  RngStream rng(13);
  const std::size_t n = 20000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = static_cast<double>(poisson_sample(3.0, rng));
  auto cf = CfHandle::univariate([](double z) { return std::exp(3.0 * (std::polar(1.0, z) - 1.0)); });
  const auto zs = linear_grid(0.1, 3, 30);
  CHECK(ecf_distance(xs, cf, zs) < 4 / std::sqrt(double(n)));
  const double z0[1] = {0.0};
  CHECK(ecf_distance(xs, cf, std::span<const double>(z0, 1)) < 1e-15);
  // negative control: a Poisson(3.3) CF is far from these draws
  auto wrong = CfHandle::univariate([](double z) { return std::exp(3.3 * (std::polar(1.0, z) - 1.0)); });
  CHECK(ecf_distance(xs, wrong, zs) > 10 / std::sqrt(double(n)));
}

TEST_CASE("bivariate empirical cf at the origin is one") {
  std::vector<double> xy = {0.1, 0.2, -1.0, 3.0, 2.0, 0.5};
  const double z[2] = {0, 0};
  const cplx c = empirical_cf(xy, 2, z);
  CHECK(c.real() == doctest::Approx(1.0));
  CHECK(c.imag() == doctest::Approx(0.0));
}

TEST_CASE("envelope scan reports negative slack when the constant is too small") {
  // f(u) = u e^{-u} under V e^{-u/2}; the sharp V is max u e^{-u/2} = 2/e, at u = 2
  auto f = [](double u) { return u * std::exp(-u); };
  auto g = [](double u) { return std::exp(-u / 2); };
  const double V = 2 / std::numbers::e;
  const auto grid = log_grid(1e-3, 50, 2000);
  const auto good = envelope_scan(f, V * 1.0001, g, grid);
  CHECK(good.worst_slack >= 0);
  const auto bad = envelope_scan(f, V / 2, g, grid);
  CHECK(bad.worst_slack < 0);
  CHECK(bad.worst_u > 1);
  CHECK(bad.worst_u < 4);
}

TEST_CASE("kde integrates to one and silverman bandwidth scales with spread") {
  RngStream rng(14);
  std::vector<double> a(4000), b(4000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = 3 * a[i];
  }
  CHECK(silverman_bandwidth(b) == doctest::Approx(3 * silverman_bandwidth(a)).epsilon(1e-12));
  const auto xs = linear_grid(-6, 6, 1201);
  const auto d = kde(a, xs, silverman_bandwidth(a));
  double mass = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) mass += 0.5 * (d[i] + d[i - 1]) * (xs[i] - xs[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("grids") {
  const auto g = log_grid(1e-3, 1e3, 7);
  REQUIRE(g.size() == 7);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g[3] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(1e3));
  const auto l = linear_grid(-1, 1, 5);
  CHECK(l[2] == doctest::Approx(0.0).scale(1));
}
