#include "tsou/model.hpp"

#include <cmath>

namespace tsou {

TsLaw::TsLaw(double alpha_, SphericalMeasure sigma_, TemperingSpec tempering_, std::vector<double> shift_)
    : TsLaw(Unchecked{}, alpha_, std::move(sigma_), std::move(tempering_), std::move(shift_)) {
  check_tempering_assumptions(tempering, sigma.size());
}

TsLaw::TsLaw(Unchecked, double alpha_, SphericalMeasure sigma_, TemperingSpec tempering_, std::vector<double> shift_)
    : alpha(alpha_), sigma(std::move(sigma_)), tempering(std::move(tempering_)), shift(std::move(shift_)) {
  if (!(alpha > 0 && alpha < 2)) throw DomainError("TS law: alpha must lie in (0,2)");
  if (sigma.size() == 0) throw DomainError("TS law: empty spherical measure");
  if (!shift.empty() && shift.size() != sigma.dimension()) throw DomainError("TS law: shift dimension mismatch");
  for (double b : shift)
    if (!std::isfinite(b)) throw DomainError("TS law: non-finite shift");
  if (auto pt = std::get_if<PowerTempered>(&tempering.variant()); pt && pt->alpha != alpha)
    throw DomainError("TS law: power tempered alpha differs from the law's alpha");
}

TsLaw TsLaw::with_sigma(SphericalMeasure s, std::vector<double> new_shift) const {
  if (s.size() != sigma.size()) throw DomainError("TS law: replacement sigma must keep its atoms");
  return TsLaw(Unchecked{}, alpha, std::move(s), tempering, std::move(new_shift));
}

TsouModel::TsouModel(TsLaw law_, double lambda_) : law(std::move(law_)), lambda(lambda_) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("TSOU model: lambda must be positive");
}

double q_eval(const TsLaw& law, const Direction& xi, double u) {
  auto idx = law.sigma.find(xi);
  if (!idx) throw DomainError("q_eval: direction is not an atom of sigma");
  return law.q(*idx, u);
}

double lemma3_integral(double alpha, double p, double kappa) {
  if (!(alpha > 0) || !(p > alpha)) throw DomainError("lemma3_integral: need 0 < alpha < p");
  if (!(kappa > 0)) throw DomainError("lemma3_integral: kappa must be positive");
  return std::tgamma(1.0 - alpha / p) * std::expm1(alpha / p * std::log(kappa)) / alpha;
}

double checked_exp(double x, const char* what) {
  if (!(x < 700.0)) throw DomainError(std::string(what) + ": exponent overflows double precision");
  return std::exp(x);
}

KValue compute_K(const TsouModel& model, double t) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("compute_K: t must be positive");
  const auto& law = model.law;
  const auto& spec = law.tempering;
  const double a = law.alpha;
  const double lt = model.lambda * t;
  if (std::holds_alternative<ConstantOne>(spec.variant())) return KValue::finite(0.0);
  const double growth = -std::expm1(-a * lt) * checked_exp(a * lt, "compute_K");  // e^{a lt} - 1
  if (std::holds_alternative<HardTruncation>(spec.variant())) {
    double s = 0;
    for (std::size_t i = 0; i < law.sigma.size(); ++i)
      s += law.sigma[i].weight * std::pow(spec.hard_gamma(i), -a);
    return KValue::finite(s * growth / a);
  }
  const double p = spec.p();
  if (p <= a) return KValue::infinity();
  double rmass = 0;  // R(R^d)
  for (std::size_t i = 0; i < law.sigma.size(); ++i)
    rmass += law.sigma[i].weight * spec.mixture(i).fractional_moment(a / p);
  if (!std::isfinite(rmass)) return KValue::infinity();
  return KValue::finite(rmass * std::tgamma(1.0 - a / p) * growth / a);
}

double compute_K_quadrature(const TsouModel& model, double t) {
  const auto& law = model.law;
  const double a = law.alpha;
  const double el = std::exp(model.lambda * t);
  quad::Options opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-10;
  double total = 0;
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    auto f = [&](double u) { return law.tempering.q_difference(i, u, el) * std::pow(u, -1.0 - a); };
    double v;
    if (std::holds_alternative<HardTruncation>(law.tempering.variant())) {
      const double g = law.tempering.hard_gamma(i);
      v = quad::value_or_throw(quad::finite(f, g / el, g, opt), "K");
    } else {
      v = quad::value_or_throw(quad::half_line(f, opt, 1.0), "K");
    }
    total += law.sigma[i].weight * v;
  }
  return total;
}

ClassFCertificate check_class_f(const TsouModel& model, double t) {
  const auto& law = model.law;
  const auto& spec = law.tempering;
  if (!spec.is_p_tempered()) throw DomainError("Class F certificate: tempering " + spec.name() + " is not p-tempered");
  ClassFCertificate c;
  const double p = spec.p();
  const double lt = model.lambda * t;
  c.epsilon = checked_exp(lt, "Class F");
  double integral = 0;
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    c.M.push_back(spec.mixture(i).moments().first);
    c.p.push_back(p);
    integral += c.M.back() * std::expm1(p * lt) * law.sigma[i].weight;
  }
  c.valid = true;
  if (!(p > law.alpha)) {
    c.valid = false;
    c.reason = "p must exceed alpha";
  } else if (!std::isfinite(integral)) {
    c.valid = false;
    c.reason = "first moment of Q is infinite";
  }
  return c;
}

}  // namespace tsou
