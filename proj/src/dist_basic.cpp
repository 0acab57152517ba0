#include "tsou/dist_basic.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "tsou/error.hpp"

namespace tsou {

MllParams::MllParams(double alpha_, double p_, double delta_) : alpha(alpha_), p(p_), delta(delta_) {
  if (!(alpha > 0) || !(p > alpha) || !(delta > 0) || !std::isfinite(p) || !std::isfinite(delta))
    throw DomainError("MLL: need p > alpha > 0 and delta > 0");
  const double dp = std::pow(delta, p);
  h = alpha * dp / (alpha * dp + p - alpha);
}

double mll_pdf(double x, const MllParams& m) {
  if (!(x > 0)) return 0.0;
  const double c = m.alpha * (m.p - m.alpha) * std::pow(m.delta, m.alpha) /
                   (m.alpha * std::pow(m.delta, m.p) + m.p - m.alpha);
  if (x <= m.delta) return c * std::pow(x, m.p - m.alpha - 1.0);
  return c * std::pow(x, -1.0 - m.alpha);
}

double mll_cdf(double x, const MllParams& m) {
  if (!(x > 0)) return 0.0;
  if (x <= m.delta) return m.h * std::pow(x / m.delta, m.p - m.alpha);
  return m.h + (1.0 - m.h) * -std::expm1(m.alpha * std::log(m.delta / x));
}

double mll_sample(const MllParams& m, RngStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  if (u2 < m.h) return std::pow(u1, 1.0 / (m.p - m.alpha)) * m.delta;
  return std::pow(u1, -1.0 / m.alpha) * m.delta;
}

GgaParams::GgaParams(double beta_, double p_, double theta_) : beta(beta_), p(p_), theta(theta_) {
  if (!(beta > 0) || !(p > 0) || !(theta > 0) || !std::isfinite(beta) || !std::isfinite(p) || !std::isfinite(theta))
    throw DomainError("GGa: beta, p, theta must be positive and finite");
}

double gga_pdf(double u, const GgaParams& g) {
  if (!(u > 0)) return 0.0;
  const double k = g.beta / g.p;
  const double logc = std::log(g.p) + k * std::log(g.theta) - std::lgamma(k);
  return std::exp(logc + (g.beta - 1.0) * std::log(u) - g.theta * std::pow(u, g.p));
}

double gga_cdf(double u, const GgaParams& g) {
  if (!(u > 0)) return 0.0;
  return boost::math::gamma_p(g.beta / g.p, g.theta * std::pow(u, g.p));
}

double gga_sample(const GgaParams& g, RngStream& rng) {
  return std::pow(gamma_sample(g.beta / g.p, g.theta, rng), 1.0 / g.p);
}

double gamma_sample(double shape, double rate, RngStream& rng) {
  if (!(rate > 0) || !std::isfinite(rate)) throw DomainError("gamma: rate must be positive");
  return rng.gamma(shape) / rate;
}

std::uint64_t poisson_sample(double mean, RngStream& rng) { return rng.poisson(mean); }

double positive_stable_sample(double alpha, double weight, RngStream& rng) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("positive stable: alpha must lie in (0,1)");
  if (!(weight > 0) || !std::isfinite(weight)) throw DomainError("positive stable: weight must be positive");
  // Kanter's representation of the standard law E exp(-l S) = exp(-l^alpha)
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
                   std::pow(std::sin(u), 1.0 / (1.0 - alpha));
  const double s = std::pow(a / e, (1.0 - alpha) / alpha);
  const double scale = std::pow(-weight * std::tgamma(-alpha), 1.0 / alpha);
  return scale * s;
}

}  // namespace tsou
