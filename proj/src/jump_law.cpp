#include "tsou/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tsou {

const char* to_string(RadialMethod m) {
  switch (m) {
    case RadialMethod::InverseCdf: return "inverse-cdf";
    case RadialMethod::Algorithm1: return "algorithm1";
    case RadialMethod::Algorithm2: return "algorithm2";
  }
  return "?";
}

JumpLaw::JumpLaw(TsouModel model, double t, std::vector<DirectionLaw> directions)
    : model_(std::move(model)), t_(t), dirs_(std::move(directions)) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("jump law: t must be positive");
  if (dirs_.empty()) throw DomainError("jump law: no directions");
  const double lt = model_.lambda * t_;
  if (model_.law.tempering.is_p_tempered()) p_ = model_.law.tempering.p();
  checked_exp(std::max(p_, 1.0) * lt, "jump law");
  exp_lt_ = std::exp(lt);
  growth_ = std::expm1(model_.alpha() * lt);
  double total = 0;
  for (const auto& d : dirs_) {
    if (!(d.probability >= 0) || !(d.kappa > 0) || !std::isfinite(d.kappa))
      throw DomainError("jump law: invalid direction entry");
    if (d.method == RadialMethod::Algorithm1 && !d.env1) throw DomainError("jump law: algorithm 1 needs an MLL envelope");
    if (d.method == RadialMethod::Algorithm2 && !d.env2) throw DomainError("jump law: algorithm 2 needs a GGa envelope");
    total += d.probability;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("jump law: direction probabilities must sum to 1");
  double acc = 0;
  for (const auto& d : dirs_) cumulative_.push_back(acc += d.probability);
  cumulative_.back() = 1.0;
}

JumpLaw JumpLaw::build(const TsouModel& model, double t) {
  const KValue K = compute_K(model, t);
  if (K.infinite) throw InfiniteKError("jump law: K is infinite, so there is no compound-Poisson component");
  if (!(K.value > 0)) throw DomainError("jump law: K = 0, so there is no jump component");
  const auto& law = model.law;
  const auto& spec = law.tempering;
  const double a = law.alpha;
  const double lt = model.lambda * t;
  const double growth = std::expm1(a * lt);
  std::vector<DirectionLaw> dirs;
  if (std::holds_alternative<HardTruncation>(spec.variant())) {
    for (std::size_t i = 0; i < law.sigma.size(); ++i) {
      const double g = spec.hard_gamma(i);
      const double kappa = a * std::pow(g, a) / growth;
      dirs.push_back({i, law.sigma[i].direction, law.sigma[i].weight / (kappa * K.value), kappa,
                      RadialMethod::InverseCdf, std::nullopt, std::nullopt});
    }
  } else if (spec.is_p_tempered()) {
    const double p = spec.p();
    const auto cert = check_class_f(model, t);
    checked_exp(p * lt, "jump law");
    const double plt = std::expm1(p * lt);  // e^{p lambda t} - 1
    for (std::size_t i = 0; i < law.sigma.size(); ++i) {
      const auto& Q = spec.mixture(i);
      const double frac = Q.fractional_moment(a / p);
      const double kappa = a / (std::tgamma(1.0 - a / p) * growth * frac);
      DirectionLaw d{i, law.sigma[i].direction, law.sigma[i].weight / (kappa * K.value), kappa,
                     RadialMethod::Algorithm1, std::nullopt, std::nullopt};
      const double M = cert.M[i];
      if (cert.valid) {
        const double scale = std::max(1.0, M * plt);
        d.env1 = Envelope1{scale / (std::tgamma(2.0 - a / p) * growth * frac), MllParams(a, p, 1.0), scale};
      }
      const double zeta = Q.support_lower();
      if (zeta > 0 && std::isfinite(M)) {
        const double scale = plt * M;
        const double V2 = std::pow(zeta, a / p - 1.0) * a * scale / (p * growth * frac);
        d.env2 = Envelope2{V2, GgaParams(p - a, p, zeta), zeta, scale};
      }
      if (d.env2 && (!d.env1 || d.env2->V < d.env1->V)) {
        d.method = RadialMethod::Algorithm2;
      } else if (!d.env1) {
        throw DomainError("jump law: no valid envelope (" + cert.reason + ")");
      }
      dirs.push_back(std::move(d));
    }
  } else {
    throw DomainError("jump law: unsupported tempering " + spec.name());
  }
  // sigma_1 sums to one analytically; renormalise the rounding away
  double total = 0;
  for (const auto& d : dirs) total += d.probability;
  for (auto& d : dirs) d.probability /= total;
  return JumpLaw(model, t, std::move(dirs));
}

std::size_t JumpLaw::index_of(const Direction& xi) const {
  for (std::size_t k = 0; k < dirs_.size(); ++k)
    if (dirs_[k].direction.approx_equal(xi)) return k;
  throw DomainError("jump law: direction is not an atom of sigma");
}

double JumpLaw::numerator(std::size_t k, double u) const {
  return model_.law.tempering.q_difference(dirs_[k].atom, u, exp_lt_);
}

double JumpLaw::pdf(std::size_t k, double u) const {
  if (!(u > 0)) return 0.0;
  const double a = model_.alpha();
  if (dirs_[k].method == RadialMethod::InverseCdf) {
    // closed form on (gamma e^{-lambda t}, gamma]
    const double g = model_.law.tempering.hard_gamma(dirs_[k].atom);
    if (u <= g * std::exp(-model_.lambda * t_) || u > g) return 0.0;
    return a * std::pow(g, a) / growth_ * std::pow(u, -1.0 - a);
  }
  return dirs_[k].kappa * numerator(k, u) * std::pow(u, -1.0 - a);
}

double JumpLaw::cdf(std::size_t k, double u) const {
  if (!(u > 0)) return 0.0;
  const auto& d = dirs_[k];
  if (d.method == RadialMethod::InverseCdf)
    return hardtrunc_cdf(u, model_.law.tempering.hard_gamma(d.atom), model_.alpha(), model_.lambda, t_);
  quad::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  auto f = [&](double x) { return pdf(k, x); };
  auto lower = quad::half_line(f, opt, std::min(u, 1.0), 0.0, u);
  return std::clamp(quad::value_or_throw(lower, "radial cdf"), 0.0, 1.0);
}

double JumpLaw::phi1(std::size_t k, double u) const {
  const auto& e = *dirs_[k].env1;
  const double g = u <= 1.0 ? std::pow(u, p_) : 1.0;
  return numerator(k, u) / (g * e.scale);
}

double JumpLaw::phi2(std::size_t k, double u) const {
  const auto& e = *dirs_[k].env2;
  const double up = std::pow(u, p_);
  const double x = e.zeta * up;
  if (x < 600) return numerator(k, u) / (e.scale * up * std::exp(-x));
  // e^{-x} is close to underflow; once the numerator underflows too, both
  // densities are below 1e-300 and a proposal never lands here.
  const double num = numerator(k, u);
  return num > 0 ? std::exp(std::log(num) + x - std::log(e.scale * up)) : 0.0;
}

double JumpLaw::checked_phi(double phi) const {
  if (!(phi >= 0.0 && phi <= 1.0 + 1e-9))
    throw EnvelopeViolation("acceptance ratio " + std::to_string(phi) + " outside [0,1]");
  return phi;
}

std::optional<double> JumpLaw::algorithm1_trial(std::size_t k, RngStream& rng) const {
  const auto& e = *dirs_[k].env1;
  const double u = mll_sample(e.proposal, rng);
  const double v = rng.uniform();
  if (v <= checked_phi(phi1(k, u))) return u;
  return std::nullopt;
}

RadialDraw JumpLaw::algorithm1(std::size_t k, RngStream& rng) const {
  if (!dirs_[k].env1) throw DomainError("algorithm 1: direction has no MLL envelope");
  for (std::uint64_t it = 1; it <= kMaxRejectionIterations; ++it)
    if (auto u = algorithm1_trial(k, rng)) return {*u, it};
  throw NumericError("algorithm 1: iteration cap reached");
}

RadialDraw JumpLaw::algorithm2(std::size_t k, RngStream& rng) const {
  if (!dirs_[k].env2) throw DomainError("algorithm 2: direction has no GGa envelope");
  const auto& e = *dirs_[k].env2;
  for (std::uint64_t it = 1; it <= kMaxRejectionIterations; ++it) {
    const double u = gga_sample(e.proposal, rng);
    const double v = rng.uniform();
    if (v <= checked_phi(phi2(k, u))) return {u, it};
  }
  throw NumericError("algorithm 2: iteration cap reached");
}

RadialDraw JumpLaw::sample_radial(std::size_t k, RngStream& rng) const {
  const auto& d = dirs_[k];
  switch (d.method) {
    case RadialMethod::InverseCdf:
      return {hardtrunc_sample(model_.law.tempering.hard_gamma(d.atom), model_.alpha(), model_.lambda, t_, rng), 1};
    case RadialMethod::Algorithm1: return algorithm1(k, rng);
    case RadialMethod::Algorithm2: return algorithm2(k, rng);
  }
  throw DomainError("jump law: unknown method");
}

JumpDraw JumpLaw::sample(RngStream& rng) const {
  std::size_t k = 0;
  if (dirs_.size() > 1) {
    const double u = rng.uniform();
    k = static_cast<std::size_t>(std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    k = std::min(k, dirs_.size() - 1);
  }
  const auto r = sample_radial(k, rng);
  return {k, r.value, r.iterations};
}

double kappa_xi(const TsouModel& model, double t, const Direction& xi) {
  const auto jl = JumpLaw::build(model, t);
  return jl.directions()[jl.index_of(xi)].kappa;
}

std::vector<std::pair<Direction, double>> sigma1_build(const TsouModel& model, double t) {
  const auto jl = JumpLaw::build(model, t);
  std::vector<std::pair<Direction, double>> out;
  for (const auto& d : jl.directions()) out.emplace_back(d.direction, d.probability);
  return out;
}

double f_xi_pdf(const TsouModel& model, double t, const Direction& xi, double u) {
  const auto jl = JumpLaw::build(model, t);
  return jl.pdf(jl.index_of(xi), u);
}

Envelope1 envelope_v1(const TsouModel& model, double t, const Direction& xi) {
  const auto jl = JumpLaw::build(model, t);
  const auto& d = jl.directions()[jl.index_of(xi)];
  if (!d.env1) throw DomainError("envelope V1: no valid Class F certificate");
  return *d.env1;
}

std::optional<Envelope2> envelope_v2(const TsouModel& model, double t, const Direction& xi) {
  const auto jl = JumpLaw::build(model, t);
  return jl.directions()[jl.index_of(xi)].env2;
}

RadialDraw algorithm1_sample(const JumpLaw& law, std::size_t k, RngStream& rng) { return law.algorithm1(k, rng); }
RadialDraw algorithm2_sample(const JumpLaw& law, std::size_t k, RngStream& rng) { return law.algorithm2(k, rng); }
JumpDraw sample_H(const JumpLaw& law, RngStream& rng) { return law.sample(rng); }

double hardtrunc_quantile(double y, double gamma, double alpha, double lambda, double t) {
  if (!(gamma > 0)) throw DomainError("hard truncation: gamma must be positive");
  const double ea = std::exp(alpha * lambda * t);
  return gamma * std::pow(ea - (ea - 1.0) * y, -1.0 / alpha);
}

double hardtrunc_cdf(double x, double gamma, double alpha, double lambda, double t) {
  const double lo = gamma * std::exp(-lambda * t);
  if (x <= lo) return 0.0;
  if (x >= gamma) return 1.0;
  const double ea = std::exp(alpha * lambda * t);
  return (ea - std::pow(gamma / x, alpha)) / (ea - 1.0);
}

double hardtrunc_sample(double gamma, double alpha, double lambda, double t, RngStream& rng) {
  return hardtrunc_quantile(rng.uniform(), gamma, alpha, lambda, t);
}

}  // namespace tsou
