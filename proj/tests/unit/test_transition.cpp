#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tsou/levy_integrals.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/ou_transition.hpp"
#include "tsou/validation.hpp"

using namespace tsou;

namespace {

constexpr double kT = 0.1;
const double kOrigin[1] = {0.0};

SphericalMeasure two_sided(double w) { return SphericalMeasure({{Direction({-1.0}), w}, {Direction({1.0}), w}}); }
SphericalMeasure one_sided(double w) { return SphericalMeasure({{Direction({1.0}), w}}); }

TsouModel pt(double alpha = 0.55, double ell = 1.0, double lambda = 1.0) {
  return pt_model(PtParams(alpha, ell), lambda);
}

cplx cf1(const TsouModel& m, double y, double z, double t, LevyRoute route = LevyRoute::Auto) {
  const double yy[1] = {y}, zz[1] = {z};
  return transition_cf(m, yy, zz, t, route);
}

std::vector<double> increments(const TransitionSampler& s, double y, int n, std::uint64_t seed) {
  std::vector<double> xs(n);
  const double yy[1] = {y};
  for (int i = 0; i < n; ++i) {
    RngStream r(seed, i);
    xs[i] = s.sample(yy, r)[0];
  }
  return xs;
}

}  // namespace

TEST_CASE("transition parameters") {
  const auto p = transition_params(pt(), kT);
  CHECK(p.poisson_mean == doctest::Approx(2 * std::expm1(0.055) * std::exp(-0.055)).epsilon(1e-12));
  CHECK(p.poisson_mean == doctest::Approx(0.107028).epsilon(1e-5));
  CHECK(p.poisson_mean == p.K.value * std::exp(-0.55 * kT));
  CHECK(p.decay == doctest::Approx(std::exp(-kT)).epsilon(1e-15));
  for (double v : p.d_alpha) CHECK(v == 0.0);
  for (double v : p.psi) CHECK(v == 0.0);
  CHECK(p.sigma0.total_mass() ==
        doctest::Approx(-std::expm1(-0.055) * pt_build(PtParams(0.55, 1.0)).sigma.total_mass()).epsilon(1e-12));

  const auto tiny = transition_params(pt(), 1e-10);
  CHECK(tiny.K.value < 1e-9);
  CHECK(tiny.sigma0.total_mass() < 1e-9);
  CHECK(tiny.decay == doctest::Approx(1.0).epsilon(1e-9));

  // shift b enters as (1 - e^{-lambda t}) b
  const TsouModel shifted(TsLaw(0.5, one_sided(0.2), Classical{{1.0}, 1.0}, {0.3}), 1.0);
  CHECK(transition_drift(shifted, kT)[0] == doctest::Approx(-std::expm1(-kT) * 0.3).epsilon(1e-14));

  const TsouModel shallow(TsLaw(0.6, one_sided(1.0), Classical{{1.0}, 0.3}), 1.0);
  CHECK_THROWS_AS(transition_params(shallow, kT), InfiniteKError);
  CHECK_THROWS_AS(TransitionSampler(shallow, kT), InfiniteKError);
}

TEST_CASE("transition CF basics") {
  const std::vector<TsouModel> models = {pt(), pt(0.75, 10.0),
                                         TsouModel(TsLaw(0.5, one_sided(0.2), Classical{{1.0}, 1.0}), 1.0),
                                         TsouModel(TsLaw(0.5, two_sided(0.2), HardTruncation{{1.0}}), 1.0),
                                         TsouModel(TsLaw(1.0, two_sided(0.3), Classical{{1.0}, 2.0}), 1.0),
                                         TsouModel(TsLaw(1.5, two_sided(0.3), Classical{{0.5}, 2.0}), 1.0)};
  for (const auto& m : models) {
    CHECK(cf1(m, 0.7, 0.0, kT) == cplx(1.0, 0.0));
    for (double z : log_grid(0.01, 100, 25))
      for (double y : {-1.0, 0.0, 2.0}) CHECK(std::abs(cf1(m, y, z, kT)) <= 1 + 1e-12);
  }
}

TEST_CASE("closed-form and quadrature routes agree") {
  const std::vector<TsouModel> models = {pt(), TsouModel(TsLaw(0.5, one_sided(0.2), Classical{{1.0}, 1.0}), 1.0),
                                         TsouModel(TsLaw(1.0, two_sided(0.3), Classical{{1.0}, 2.0}), 1.0),
                                         TsouModel(TsLaw(1.5, two_sided(0.3), Classical{{0.5}, 2.0}), 1.0),
                                         TsouModel(TsLaw(1.5, one_sided(0.3), Classical{{2.0}, 1.0}), 1.0)};
  // small z puts the closed forms on their series branch
  for (const auto& m : models)
    for (double z : {0.003, 0.05, 0.3, 1.0, 4.0, 15.0})
      CHECK(std::abs(cf1(m, 0.5, z, kT) - cf1(m, 0.5, z, kT, LevyRoute::Quadrature)) < 1e-9);
}

TEST_CASE("stable tempering reduces to the stable transition") {
  const double a = 0.6, w = 0.4;
  const TsouModel m(TsLaw(a, two_sided(w), ConstantOne{}), 1.0);
  CHECK(transition_params(m, kT).K.value == 0.0);
  for (double z : {0.5, 2.0, 7.0}) {
    const double y = 1.3;
    const cplx I = stable_levy_integral(a, z) + stable_levy_integral(a, -z);
    const cplx expect = std::exp(cplx(0, std::exp(-kT) * y * z) - std::expm1(-a * kT) * w * I);
    CHECK(std::abs(cf1(m, y, z, kT) - expect) < 1e-12);
  }
  const TransitionSampler s(m, kT, {1e-6, true});
  RngStream r(31);
  StepDiagnostics d;
  for (int i = 0; i < 100; ++i) {
    s.sample(kOrigin, r, &d);
    CHECK(d.jumps == 0);
  }
  CHECK(s.jump_law() == nullptr);
}

TEST_CASE("long horizon approaches the limiting law") {
  const std::vector<TsouModel> models = {pt(), TsouModel(TsLaw(0.5, one_sided(0.2), Classical{{1.0}, 1.0}), 1.0),
                                         TsouModel(TsLaw(1.5, two_sided(0.3), Classical{{0.5}, 2.0}), 1.0)};
  for (const auto& m : models)
    for (double z : {0.2, 1.0, 5.0}) {
      const double zz[1] = {z};
      CHECK(std::abs(cf1(m, 1.0, z, 20.0) - limit_cf(m, zz)) < 1e-6);
    }
}

TEST_CASE("conditioning on y is a deterministic shift") {
  const TransitionSampler s(pt(), kT);
  const double y[1] = {2.5};
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream a(32, i), b(32, i);
    const double d = s.sample(y, a)[0] - s.sample(kOrigin, b)[0];
    CHECK(d == doctest::Approx(std::exp(-kT) * 2.5).epsilon(1e-13));
  }
}

TEST_CASE("sampled increments match the transition CF") {
  const int n = 20000;
  const auto z = log_grid(0.1, 20, 20);
  const double bound = 4 / std::sqrt(double(n));
  const std::vector<std::pair<TsouModel, double>> cases = {
      {pt(), 0.0},
      {TsouModel(TsLaw(0.5, one_sided(0.2), Classical{{1.0}, 1.0}), 1.0), 0.5},
      {TsouModel(TsLaw(0.5, two_sided(0.2), HardTruncation{{1.0}}), 1.0), -0.5}};
  for (const auto& [m, y] : cases) {
    const TransitionSampler s(m, kT);
    const auto xs = increments(s, y, n, 33);
    const auto cf = CfHandle::univariate([&](double zz) { return cf1(m, y, zz, kT); });
    CHECK(ecf_distance(xs, cf, z) < bound);
  }
}

TEST_CASE("one step from the limiting law stays there") {
  const PtParams p(0.55, 1.0);
  const TsouModel m = pt_model(p, 1.0);
  const SeriesThinningSampler limit(make_base_spec(pt_build(p), 1e-5));
  const TransitionSampler s(m, kT);
  const int n = 20000;
  std::vector<double> stepped(n), fresh(n);
  for (int i = 0; i < n; ++i) {
    RngStream r(34, i);
    const auto y = limit.sample(r);
    stepped[i] = s.sample(y, r)[0];
    fresh[i] = limit.sample(r)[0];
  }
  CHECK(two_sample_ks(stepped, fresh) < ks_critical(n / 2.0));
}

TEST_CASE("fast mean reversion decorrelates steps") {
  const TsouModel m = pt_model(PtParams(0.75, 1.0), 200.0);
  const TransitionSampler s(m, kT, {1e-4, true});
  RngStream r(35);
  const auto path = simulate_path(s, std::vector<double>{0.0}, 10000, r);
  std::vector<double> v;
  for (std::size_t k = 1; k < path.states.size(); ++k) v.push_back(std::atan(path.states[k][0]));
  const double mu = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double c0 = 0, c1 = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    c0 += (v[k] - mu) * (v[k] - mu);
    if (k) c1 += (v[k] - mu) * (v[k - 1] - mu);
  }
  CHECK(std::fabs(c1 / c0) < 0.05);
}

TEST_CASE("paths") {
  const TransitionSampler s(pt(), kT);
  const double y0[1] = {0.0};
  const auto one = simulate_paths(s, y0, 50, 6, 36, 1);
  const auto four = simulate_paths(s, y0, 50, 6, 36, 4);
  REQUIRE(one.size() == 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].states.size() == 51);
    CHECK(one[i].times.size() == one[i].states.size());
    CHECK(one[i].steps.size() == 50);
    CHECK(one[i].times.back() == doctest::Approx(5.0));
    CHECK(one[i].stream == i);
    for (std::size_t k = 0; k < one[i].states.size(); ++k) CHECK(one[i].states[k] == four[i].states[k]);
  }
  CHECK(one[0].states != one[1].states);
  RngStream r(36, 0);
  const auto single = simulate_path(s, y0, 50, r);
  CHECK(single.states == one[0].states);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 37) throw NumericError("boom");
                               }),
                  NumericError);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::accumulate(hit.begin(), hit.end(), 0) == 1000);
}
