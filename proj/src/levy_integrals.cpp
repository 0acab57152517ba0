#include "tsou/levy_integrals.hpp"

#include <cmath>
#include <numbers>

namespace tsou {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// e^{ix} - 1 without cancellation
cplx expm1_i(double x) {
  const double h = std::sin(0.5 * x);
  return {-2.0 * h * h, std::sin(x)};
}

// (1+w)^a minus its first m binomial terms, m = 1 (the constant) or 2 (also a w)
cplx pow1p_remainder(cplx w, double a, int m) {
  if (std::abs(w) < 0.1) {
    cplx term = 1.0, acc = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= (a - (k - 1)) / k * w;
      if (k >= m) {
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) break;
      }
    }
    return acc;
  }
  cplx r = std::pow(1.0 + w, a) - 1.0;
  if (m >= 2) r -= a * w;
  return r;
}

double h_alpha(double alpha, double u) {
  if (alpha < 1) return 0.0;
  if (alpha == 1) return u <= 1.0 ? 1.0 : 0.0;
  return 1.0;
}

}  // namespace

cplx stable_levy_integral(double alpha, double s) {
  if (s == 0) return 0.0;
  const double as = std::fabs(s);
  if (alpha == 1.0) return {-0.5 * std::numbers::pi * as, -s * std::log(as) + s * (1.0 - kEulerGamma)};
  const double sgn = s > 0 ? 1.0 : -1.0;
  return std::tgamma(-alpha) * std::pow(as, alpha) * std::polar(1.0, -0.5 * std::numbers::pi * alpha * sgn);
}

cplx laplace_levy_integral(double alpha, double r, double s) {
  if (alpha == 1.0) throw DomainError("laplace_levy_integral: alpha = 1 has no closed form here");
  if (s == 0) return 0.0;
  const cplx w(0.0, -s / r);
  return std::tgamma(-alpha) * std::pow(r, alpha) * pow1p_remainder(w, alpha, alpha < 1 ? 1 : 2);
}

cplx levy_integral_quadrature(const std::function<double(double)>& g, double alpha, double s, double hi,
                              const std::function<double(double)>& majorant) {
  if (s == 0) return 0.0;
  const double as = std::fabs(s);
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  opt.max_panels = 20000;
  auto f = [&](double u) -> cplx {
    const double gu = g(u);
    if (gu == 0) return 0.0;
    cplx psi = expm1_i(s * u);
    const double h = h_alpha(alpha, u);
    if (h != 0) psi -= cplx(0.0, s * u * h);
    return psi * gu * std::pow(u, -1.0 - alpha);
  };
  // (0, a]: non-oscillatory, integrable singularity at 0
  double a = std::min(hi, 1.0 / as);
  if (alpha == 1.0) a = std::min(a, 1.0);
  cplx total = quad::value_or_throw(quad::half_line(f, opt, a, 0.0, a), "levy integral near zero");
  if (!(hi > a)) return total;
  // [a, hi): the -1 and -isu h terms do not oscillate and get one quadrature
  // each; only e^{isu} is chunked by half periods
  auto plain = [&](double u) { return g(u) * std::pow(u, -1.0 - alpha); };
  total -= quad::value_or_throw(quad::half_line(plain, opt, a, a, hi), "levy integral tail");
  const double h_hi = alpha > 1 ? hi : (alpha == 1.0 ? std::min(hi, 1.0) : a);
  if (h_hi > a) {
    auto drift = [&](double u) { return g(u) * std::pow(u, -alpha); };
    total -= cplx(0.0, s * quad::value_or_throw(quad::half_line(drift, opt, a, a, h_hi), "levy integral drift"));
  }
  auto osc = [&](double u) -> cplx {
    const double gu = g(u);
    if (gu == 0) return 0.0;
    return std::polar(gu * std::pow(u, -1.0 - alpha), s * u);
  };
  const double L = std::numbers::pi / as;
  double lo = a;
  int quiet = 0;
  const std::size_t max_chunks = 2'000'000;
  for (std::size_t n = 0; n < max_chunks; ++n) {
    const double up = std::min(lo + L, hi);
    const cplx piece = quad::value_or_throw(quad::finite(osc, lo, up, opt), "levy integral chunk");
    total += piece;
    lo = up;
    if (!(lo < hi)) return total;
    if (std::isinf(hi)) {
      // for a decreasing amplitude the remaining oscillatory tail is at most
      // twice the amplitude times 1/|s|
      const double tail = 2.0 * majorant(lo) * std::pow(lo, -1.0 - alpha) / as;
      quiet = std::abs(piece) < 1e-13 ? quiet + 1 : 0;
      if (tail < 1e-13 && quiet >= 2) return total;
    }
  }
  throw NumericError("levy integral: oscillatory tail did not converge");
}

cplx levy_integral(const TsLaw& law, std::size_t atom, double s, double kappa, LevyRoute route) {
  if (s == 0) return 0.0;
  const double a = law.alpha;
  const auto& spec = law.tempering;
  const bool diff = kappa > 0;
  if (diff && !(kappa > 1)) throw DomainError("levy integral: kappa must exceed 1");
  const auto& v = spec.variant();
  if (route == LevyRoute::Auto) {
    if (std::holds_alternative<ConstantOne>(v)) return diff ? cplx(0.0) : stable_levy_integral(a, s);
    if (spec.is_p_tempered() && spec.p() == 1.0 && a != 1.0) {
      const auto& Q = spec.mixture(atom);
      if (diff)
        return Q.integrate([&](double r) { return laplace_levy_integral(a, r, s) - laplace_levy_integral(a, r * kappa, s); },
                           1.0 / std::fabs(s));
      return Q.integrate([&](double r) { return laplace_levy_integral(a, r, s); }, 1.0 / std::fabs(s));
    }
  }
  if (std::holds_alternative<HardTruncation>(v)) {
    const double g = spec.hard_gamma(atom);
    if (diff) {
      // q(u) - q(u kappa) = 1 on (g/kappa, g]; integrate that window directly
      auto one = [](double) { return 1.0; };
      auto full = levy_integral_quadrature(one, a, s, g, one);
      auto inner = levy_integral_quadrature(one, a, s, g / kappa, one);
      return full - inner;
    }
    return levy_integral_quadrature([](double) { return 1.0; }, a, s, g, [](double) { return 1.0; });
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto q = [&](double u) { return spec.q(atom, u); };
  if (diff) {
    auto g = [&](double u) { return spec.q_difference(atom, u, kappa); };
    return levy_integral_quadrature(g, a, s, inf, q);
  }
  return levy_integral_quadrature(q, a, s, inf, q);
}

cplx ts_log_cf(const TsLaw& law, std::span<const double> z, LevyRoute route) {
  if (z.size() != law.dimension()) throw DomainError("CF: frequency dimension mismatch");
  cplx c = 0.0;
  for (std::size_t j = 0; j < law.shift.size(); ++j) c += cplx(0.0, law.shift[j] * z[j]);
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    const double s = law.sigma[i].direction.dot(z);
    c += law.sigma[i].weight * levy_integral(law, i, s, 0.0, route);
  }
  return c;
}

}  // namespace tsou
