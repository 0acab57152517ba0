#include "tsou/models_pt.hpp"

#include <cmath>
#include <numbers>

#include "tsou/levy_integrals.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

namespace {

void check_pt(double alpha, double ell, double c) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("PT: alpha must lie in (0,1)");
  if (!(ell > 0) || !std::isfinite(ell)) throw DomainError("PT: ell must be positive");
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("PT: c must be positive");
}

}  // namespace

PtParams::PtParams(double alpha_, double ell_, double c_) : alpha(alpha_), ell(ell_), c(c_) {
  check_pt(alpha, ell, c);
  A = c * (alpha + ell + 1) * alpha / std::tgamma(1 - alpha);
  B = std::beta(ell + 1, alpha + 1);
}

double pt_power_integral(double alpha, double ell, double e) {
  quad::Options opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-12;
  auto f = [&](double x) { return std::pow(1 + x, -2 - alpha - ell) * std::pow(x, e); };
  return quad::value_or_throw(quad::half_line(f, opt, 1.0), "PT power integral");
}

double pt_levy_mass(const PtParams& p) { return 2 * p.c * p.alpha / std::tgamma(1 - p.alpha); }

SphericalMeasure pt_sigma(const PtParams& p) {
  return SphericalMeasure({{Direction({-1.0}), p.A * p.B}, {Direction({1.0}), p.A * p.B}});
}

TsLaw pt_build(const PtParams& p) { return TsLaw(p.alpha, pt_sigma(p), PowerTempered{p.alpha, p.ell, p.c}); }

TsouModel pt_model(const PtParams& p, double lambda) { return TsouModel(pt_build(p), lambda); }

RosinskiMeasure pt_rosinski(const PtParams& p) {
  const double A = p.A, e = -2 - p.alpha - p.ell;
  auto dens = [A, e](double u) { return A * std::pow(1 + u, e); };
  std::vector<RosinskiRadial> r;
  // u * density(u) is analytic for |Im log u| < pi
  for (double s : {-1.0, 1.0}) r.push_back({Direction({s}), dens, std::numbers::pi, 1.0});
  return RosinskiMeasure(p.alpha, 1.0, std::move(r));
}

double pt_f_xi_prefactor(const PtParams& p, double lambda, double t) {
  const double lt = lambda * t;
  return p.alpha * (p.alpha + p.ell + 1) / (std::tgamma(1 - p.alpha) * std::expm1(lt * p.alpha));
}

double pt_f_xi_pdf(const PtParams& p, double lambda, double t, double u) {
  if (!(u > 0)) return 0.0;
  static thread_local std::unique_ptr<RadialMixture> cache;
  static thread_local std::pair<double, double> key{-1, -1};
  if (!cache || key != std::pair{p.alpha, p.ell}) {
    cache = std::make_unique<RadialMixture>(power_tempered_mixture(p.alpha, p.ell));
    key = {p.alpha, p.ell};
  }
  // the s-integral equals B times the Laplace difference of Q_xi
  const double integral = p.B * cache->laplace_difference(u, checked_exp(lambda * t, "PT f_xi"));
  return pt_f_xi_prefactor(p, lambda, t) * integral * std::pow(u, -1 - p.alpha);
}

double pt_envelope_scale(const PtParams& p, double lambda, double t) {
  return std::max(1.0, std::expm1(lambda * t) / p.B * std::beta(p.ell + 2, p.alpha));
}

double pt_v1(const PtParams& p, double lambda, double t) {
  return (p.alpha + p.ell + 1) * p.B / (std::tgamma(2 - p.alpha) * std::expm1(lambda * t * p.alpha)) *
         pt_envelope_scale(p, lambda, t);
}

double pt_phi1(const PtParams& p, double lambda, double t, double u) {
  const double num = power_tempered_mixture(p.alpha, p.ell).laplace_difference(u, std::exp(lambda * t));
  return num / ((u <= 1 ? u : 1.0) * pt_envelope_scale(p, lambda, t));
}

JumpLaw pt_jumplaw(const PtParams& p, double lambda, double t) {
  const TsouModel model = pt_model(p, lambda);
  // numerator() uses the normalised Q_xi, so the 1/B of Q_xi moves into kappa
  const double kappa = p.B * pt_f_xi_prefactor(p, lambda, t);
  const double scale = pt_envelope_scale(p, lambda, t);
  const Envelope1 env{pt_v1(p, lambda, t), MllParams(p.alpha, 1.0, 1.0), scale};
  std::vector<DirectionLaw> dirs;
  for (std::size_t i = 0; i < 2; ++i)
    dirs.push_back({i, model.law.sigma[i].direction, 0.5, kappa, RadialMethod::Algorithm1, env, std::nullopt});
  return JumpLaw(model, t, std::move(dirs));
}

PtMultivariate::PtMultivariate(std::vector<Direction> gens, PtParams p) : generators(std::move(gens)), params(p) {
  if (generators.empty()) throw DomainError("multivariate PT: need at least one generator");
  const std::size_t d = generators.front().dim();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].dim() != d) throw DomainError("multivariate PT: generators differ in dimension");
    for (std::size_t j = 0; j < i; ++j) {
      const double dot = generators[i].dot(generators[j].coords());
      if (std::fabs(std::fabs(dot) - 1.0) < 1e-12)
        throw DomainError("multivariate PT: generators " + std::to_string(j) + " and " + std::to_string(i) +
                          " are equal or antipodal");
    }
  }
}

TsLaw pt_multivariate_build(const PtMultivariate& pm) {
  const auto& p = pm.params;
  std::vector<SphericalAtom> atoms;
  for (const auto& s : pm.generators) {
    atoms.push_back({s, p.A * p.B});
    std::vector<double> neg(s.coords().begin(), s.coords().end());
    for (double& v : neg) v = -v;
    atoms.push_back({Direction(std::move(neg)), p.A * p.B});
  }
  return TsLaw(p.alpha, SphericalMeasure(std::move(atoms)), PowerTempered{p.alpha, p.ell, p.c});
}

TsouModel pt_multivariate_model(const PtMultivariate& pm, double lambda) {
  return TsouModel(pt_multivariate_build(pm), lambda);
}

double pt_unit_weight_c(double alpha, double ell) {
  const PtParams unit(alpha, ell, 1.0);
  return 1.0 / (unit.A * unit.B);
}

double pt_log_cf(const PtParams& p, const RadialMixture& Q, double z) {
  // Both atoms carry weight AB and the law is symmetric, so only the real part
  // of the closed-form Laplace integral survives:
  // Re[(1 - iw)^alpha] = (1 + w^2)^{alpha/2} cos(alpha atan w), w = z/s.
  const double a = p.alpha;
  const double az = std::fabs(z);
  if (az == 0) return 0.0;
  const auto& tab = Q.table();
  if (tab.nodes.empty()) throw NumericError("PT CF: mixture has no quadrature table");
  double acc = 0;
  for (std::size_t k = 0; k < tab.nodes.size(); ++k) {
    const double s = tab.nodes[k];
    const double w = az / s;
    const double re = w < 1e-3 ? 0.5 * a * (1 - a) * w * w * (1 - (2 - a) * (3 - a) * w * w / 12)
                               : std::exp(0.5 * a * std::log1p(w * w)) * std::cos(a * std::atan(w)) - 1;
    acc += tab.weights[k] * std::pow(s, a) * re;
  }
  return 2 * p.A * p.B * std::tgamma(-a) * acc;
}

CfHandle pt_cf(const PtParams& p) {
  auto Q = std::make_shared<RadialMixture>(power_tempered_mixture(p.alpha, p.ell));
  CfHandle h;
  h.cf = [p, Q](std::span<const double> z) { return cplx(std::exp(pt_log_cf(p, *Q, z[0])), 0.0); };
  h.dimension = 1;
  // spread of the law grows roughly like c^{1/alpha}
  h.scale = std::pow(p.c, 1.0 / p.alpha);
  return h;
}

PtReferenceDensity::PtReferenceDensity(const PtParams& p, InversionOptions options)
    : inverter_(pt_cf(p), options) {}

double pt_reference_density(const PtParams& p, double x) {
  InversionOptions opt;
  opt.x_max = std::max(opt.x_max, std::fabs(x));
  return PtReferenceDensity(p, opt)(x);
}

}  // namespace tsou
