#include "tsou/tempering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

namespace tsou {

namespace {

double norm2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t pick(const std::vector<double>& v, std::size_t atom) {
  if (v.size() == 1) return 0;
  if (atom >= v.size()) throw DomainError("tempering: atom index out of range");
  return atom;
}

}  // namespace

// ------------------------------------------------------------------ Direction

Direction::Direction(std::vector<double> v) : v_(std::move(v)) {
  if (v_.empty()) throw DomainError("direction: empty vector");
  for (double x : v_)
    if (!std::isfinite(x)) throw DomainError("direction: non-finite coordinate");
  if (std::fabs(norm2(v_) - 1.0) > 1e-12) throw DomainError("direction: not a unit vector");
}

Direction Direction::normalized(std::vector<double> v) {
  const double n = norm2(v);
  if (!(n > 0) || !std::isfinite(n)) throw DomainError("direction: cannot normalise a zero vector");
  for (double& x : v) x /= n;
  return Direction(std::move(v));
}

double Direction::dot(std::span<const double> z) const {
  if (z.size() != v_.size()) throw DomainError("direction: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * z[i];
  return s;
}

bool Direction::approx_equal(const Direction& o, double tol) const {
  if (o.dim() != dim()) return false;
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (std::fabs(v_[i] - o.v_[i]) > tol) return false;
  return true;
}

// ------------------------------------------------------------------ SphericalMeasure

SphericalMeasure::SphericalMeasure(std::vector<SphericalAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("spherical measure: needs at least one atom");
  dim_ = atoms_.front().direction.dim();
  for (const auto& a : atoms_) {
    if (a.direction.dim() != dim_) throw DomainError("spherical measure: mixed dimensions");
    if (!(a.weight > 0) || !std::isfinite(a.weight)) throw DomainError("spherical measure: weights must be positive");
  }
}

double SphericalMeasure::total_mass() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

SphericalMeasure SphericalMeasure::scaled(double factor) const {
  if (!(factor > 0)) throw DomainError("spherical measure: scale factor must be positive");
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= factor;
  return SphericalMeasure(std::move(atoms));
}

std::optional<std::size_t> SphericalMeasure::find(const Direction& xi, double tol) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].direction.approx_equal(xi, tol)) return i;
  return std::nullopt;
}

// ------------------------------------------------------------------ RadialMixture

RadialMixture RadialMixture::point(double s, double weight) { return discrete({s}, {weight}); }

RadialMixture RadialMixture::discrete(std::vector<double> s, std::vector<double> w) {
  if (s.empty() || s.size() != w.size()) throw DomainError("radial mixture: positions and weights must match");
  RadialMixture m;
  m.lower_ = s.front();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0) || !std::isfinite(s[i])) throw DomainError("radial mixture: atoms must lie in (0, inf)");
    if (!(w[i] >= 0) || !std::isfinite(w[i])) throw DomainError("radial mixture: weights must be nonnegative");
    m.lower_ = std::min(m.lower_, s[i]);
  }
  m.s_ = std::move(s);
  m.w_ = std::move(w);
  m.compute_moments(0);
  return m;
}

RadialMixture RadialMixture::density(std::function<double(double)> pdf, double fractional_order, DensityInfo info) {
  if (!pdf) throw DomainError("radial mixture: empty density");
  if (!(info.support_lower >= 0)) throw DomainError("radial mixture: support must lie in [0, inf)");
  RadialMixture m;
  m.pdf_ = std::move(pdf);
  m.lower_ = info.support_lower;
  m.scale_ = info.scale > 0 ? info.scale : 1.0;
  if (info.strip > 0 && info.support_lower == 0) m.build_table(info.strip);
  if (info.moments) {
    m.moments_ = *info.moments;
  } else {
    m.compute_moments(fractional_order);
  }
  return m;
}

double RadialMixture::pdf(double s) const {
  if (!pdf_) throw DomainError("radial mixture: discrete mixture has no density");
  return s > lower_ ? pdf_(s) : 0.0;
}

void RadialMixture::build_table(double strip) {
  const double h = std::min(0.25, strip / 6.0);
  const int centre = static_cast<int>(std::lround(std::log(scale_) / h));
  const int kcap = static_cast<int>(700.0 / h);
  auto weight = [&](int k) {
    const double s = std::exp(k * h);
    const double w = h * s * pdf_(s);
    return std::isfinite(w) ? w : 0.0;
  };
  double wmax = weight(centre);
  double wsmax = wmax * std::max(1.0, std::exp(centre * h));
  int hi = centre;
  for (int quiet = 0, k = centre + 1; k < kcap && quiet < 8; ++k) {
    const double w = weight(k);
    const double ws = w * std::max(1.0, std::exp(k * h));
    wmax = std::max(wmax, w);
    wsmax = std::max(wsmax, ws);
    quiet = (w <= 1e-22 * wmax && ws <= 1e-22 * wsmax) ? quiet + 1 : 0;
    hi = k;
  }
  int lo = centre;
  for (int quiet = 0, k = centre - 1; k > -kcap && quiet < 8; --k) {
    const double w = weight(k);
    wmax = std::max(wmax, w);
    quiet = (w <= 1e-22 * wmax) ? quiet + 1 : 0;
    lo = k;
  }
  table_.h = h;
  table_.k_min = lo;
  for (int k = lo; k <= hi; ++k) {
    table_.nodes.push_back(std::exp(k * h));
    table_.weights.push_back(weight(k));
  }
}

void RadialMixture::compute_moments(double order) {
  moments_.fractional_order = order;
  if (is_discrete() || !table_.empty()) {
    moments_.mass = integrate([](double) { return 1.0; });
    moments_.first = integrate([](double s) { return s; });
    moments_.fractional = integrate([order](double s) { return std::pow(s, order); });
    if (!table_.empty()) {
      // a first-moment integrand still sizeable at the top of the table diverges
      const double top = table_.weights.back() * table_.nodes.back();
      if (top > 1e-12 * moments_.first) moments_.first = std::numeric_limits<double>::infinity();
    }
    return;
  }
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  auto moment = [&](auto g) {
    auto r = quad::half_line([&](double s) { return g(s) * pdf_(s); }, opt, scale_, lower_);
    return r.converged ? r.value : std::numeric_limits<double>::infinity();
  };
  moments_.mass = moment([](double) { return 1.0; });
  moments_.first = moment([](double s) { return s; });
  moments_.fractional = moment([order](double s) { return std::pow(s, order); });
  if (!std::isfinite(moments_.mass)) throw DomainError("radial mixture: total mass is not finite");
}

double RadialMixture::fractional_moment(double order) const {
  if (order == moments_.fractional_order) return moments_.fractional;
  return integrate([order](double s) { return std::pow(s, order); });
}

RadialMixture RadialMixture::normalized() const {
  const double m = moments_.mass;
  if (!(m > 0)) throw DomainError("radial mixture: zero mass cannot be normalised");
  RadialMixture out = *this;
  for (double& w : out.w_) w /= m;
  for (double& w : out.table_.weights) w /= m;
  if (pdf_) {
    auto f = pdf_;
    out.pdf_ = [f, m](double s) { return f(s) / m; };
  }
  out.moments_.mass = 1.0;
  out.moments_.first /= m;
  out.moments_.fractional /= m;
  return out;
}

double RadialMixture::laplace(double x) const {
  if (!table_.empty()) {
    double acc = 0;
    for (std::size_t k = 0; k < table_.nodes.size(); ++k) {
      const double y = x * table_.nodes[k];
      if (y > 745) break;
      acc += table_.weights[k] * std::exp(-y);
    }
    return acc;
  }
  return integrate([x](double s) { return std::exp(-x * s); }, x > 0 ? 1.0 / x : 1.0);
}

double RadialMixture::laplace_complement(double x) const {
  return integrate([x](double s) { return -std::expm1(-x * s); }, x > 0 ? 1.0 / x : 1.0);
}

double RadialMixture::laplace_difference(double x, double kappa) const {
  const double km1 = kappa - 1.0;
  if (!table_.empty()) {
    double acc = 0;
    for (std::size_t k = 0; k < table_.nodes.size(); ++k) {
      const double y = x * table_.nodes[k];
      if (y > 60) break;
      acc += table_.weights[k] * std::exp(-y) * -std::expm1(-y * km1);
    }
    return acc;
  }
  return integrate([x, km1](double s) { return std::exp(-x * s) * -std::expm1(-x * s * km1); },
                   x > 0 ? 1.0 / x : 1.0);
}

RadialMixture power_tempered_mixture(double alpha, double ell) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("power tempered: alpha must lie in (0,1)");
  if (!(ell > 0) || !std::isfinite(ell)) throw DomainError("power tempered: ell must be positive");
  const double B = boost::math::beta(ell + 1.0, alpha + 1.0);
  const double logB = std::log(B);
  const double e = 2.0 + alpha + ell;
  auto pdf = [ell, e, logB](double s) { return std::exp(ell * std::log(s) - e * std::log1p(s) - logB); };
  RadialMixture::DensityInfo info;
  info.strip = std::numbers::pi;  // singularity of (1+s) at s = -1
  info.moments = RadialMixture::Moments{1.0, boost::math::beta(ell + 2.0, alpha) / B, 1.0 / ((alpha + ell + 1.0) * B),
                                        alpha};
  return RadialMixture::density(pdf, alpha, info);
}

// ------------------------------------------------------------------ TemperingSpec

TemperingSpec::TemperingSpec(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const ConstantOne&) {},
                 [](const HardTruncation& h) {
                   if (h.gamma.empty()) throw DomainError("hard truncation: no gamma values");
                   for (double g : h.gamma)
                     if (!(g > 0) || !std::isfinite(g)) throw DomainError("hard truncation: gamma must be positive");
                 },
                 [this](const Classical& c) {
                   if (c.zeta.empty()) throw DomainError("classical tempering: no zeta values");
                   if (!(c.p > 0) || !std::isfinite(c.p)) throw DomainError("classical tempering: p must be positive");
                   for (double z : c.zeta) {
                     if (!(z > 0) || !std::isfinite(z)) throw DomainError("classical tempering: zeta must be positive");
                     mixtures_.push_back(RadialMixture::point(z));
                   }
                 },
                 [this](const PTemperedMixture& m) {
                   if (m.mixtures.empty()) throw DomainError("p-tempered mixture: no mixtures");
                   if (!(m.p > 0) || !std::isfinite(m.p)) throw DomainError("p-tempered mixture: p must be positive");
                   for (const auto& q : m.mixtures) {
                     if (std::fabs(q.moments().mass - 1.0) > 1e-8)
                       throw DomainError("p-tempered mixture: each Q must be a probability measure");
                   }
                   mixtures_ = m.mixtures;
                 },
                 [this](const PowerTempered& pt) {
                   if (!(pt.c > 0)) throw DomainError("power tempered: c must be positive");
                   mixtures_.push_back(power_tempered_mixture(pt.alpha, pt.ell));
                 },
             },
             v_);
}

std::string TemperingSpec::name() const {
  return std::visit(overloaded{
                        [](const ConstantOne&) { return std::string("constant-one"); },
                        [](const HardTruncation&) { return std::string("hard-truncation"); },
                        [](const Classical&) { return std::string("classical"); },
                        [](const PTemperedMixture&) { return std::string("p-tempered-mixture"); },
                        [](const PowerTempered&) { return std::string("power-tempered"); },
                    },
                    v_);
}

std::size_t TemperingSpec::entries() const {
  return std::visit(overloaded{
                        [](const ConstantOne&) -> std::size_t { return 0; },
                        [](const HardTruncation& h) { return h.gamma.size(); },
                        [](const Classical& c) { return c.zeta.size(); },
                        [](const PTemperedMixture& m) { return m.mixtures.size(); },
                        [](const PowerTempered&) -> std::size_t { return 1; },
                    },
                    v_);
}

double TemperingSpec::q(std::size_t atom, double u) const {
  if (!(u > 0)) throw DomainError("tempering: u must be positive");
  return std::visit(overloaded{
                        [](const ConstantOne&) { return 1.0; },
                        [&](const HardTruncation& h) { return u <= h.gamma[pick(h.gamma, atom)] ? 1.0 : 0.0; },
                        [&](const Classical& c) { return std::exp(-c.zeta[pick(c.zeta, atom)] * std::pow(u, c.p)); },
                        [&](const PTemperedMixture& m) { return mixture(atom).laplace(std::pow(u, m.p)); },
                        [&](const PowerTempered&) { return mixtures_[0].laplace(u); },
                    },
                    v_);
}

double TemperingSpec::q_complement(std::size_t atom, double u) const {
  if (!(u > 0)) throw DomainError("tempering: u must be positive");
  return std::visit(overloaded{
                        [](const ConstantOne&) { return 0.0; },
                        [&](const HardTruncation& h) { return u <= h.gamma[pick(h.gamma, atom)] ? 0.0 : 1.0; },
                        [&](const Classical& c) { return -std::expm1(-c.zeta[pick(c.zeta, atom)] * std::pow(u, c.p)); },
                        [&](const PTemperedMixture& m) { return mixture(atom).laplace_complement(std::pow(u, m.p)); },
                        [&](const PowerTempered&) { return mixtures_[0].laplace_complement(u); },
                    },
                    v_);
}

double TemperingSpec::q_difference(std::size_t atom, double u, double kappa) const {
  if (!(u > 0)) throw DomainError("tempering: u must be positive");
  return std::visit(overloaded{
                        [](const ConstantOne&) { return 0.0; },
                        [&](const HardTruncation& h) {
                          const double g = h.gamma[pick(h.gamma, atom)];
                          return (u <= g && u * kappa > g) ? 1.0 : 0.0;
                        },
                        [&](const Classical& c) {
                          const double x = c.zeta[pick(c.zeta, atom)] * std::pow(u, c.p);
                          return std::exp(-x) * -std::expm1(-x * std::expm1(c.p * std::log(kappa)));
                        },
                        [&](const PTemperedMixture& m) {
                          return mixture(atom).laplace_difference(std::pow(u, m.p), std::pow(kappa, m.p));
                        },
                        [&](const PowerTempered&) { return mixtures_[0].laplace_difference(u, kappa); },
                    },
                    v_);
}

bool TemperingSpec::is_p_tempered() const {
  return std::holds_alternative<Classical>(v_) || std::holds_alternative<PTemperedMixture>(v_) ||
         std::holds_alternative<PowerTempered>(v_);
}

double TemperingSpec::p() const {
  if (auto c = std::get_if<Classical>(&v_)) return c->p;
  if (auto m = std::get_if<PTemperedMixture>(&v_)) return m->p;
  if (std::holds_alternative<PowerTempered>(v_)) return 1.0;
  throw DomainError("tempering: " + name() + " is not p-tempered");
}

const RadialMixture& TemperingSpec::mixture(std::size_t atom) const {
  if (mixtures_.empty()) throw DomainError("tempering: " + name() + " has no mixing measure");
  if (mixtures_.size() == 1) return mixtures_[0];
  if (atom >= mixtures_.size()) throw DomainError("tempering: atom index out of range");
  return mixtures_[atom];
}

double TemperingSpec::hard_gamma(std::size_t atom) const {
  auto h = std::get_if<HardTruncation>(&v_);
  if (!h) throw DomainError("tempering: not a hard truncation");
  return h->gamma[pick(h->gamma, atom)];
}

void check_tempering_assumptions(const TemperingSpec& spec, std::size_t n_atoms) {
  const std::size_t e = spec.entries();
  if (e > 1 && e != n_atoms)
    throw DomainError("tempering: " + std::to_string(e) + " per-atom entries for " + std::to_string(n_atoms) +
                      " spherical atoms");
  const int n = 61;
  for (std::size_t a = 0; a < n_atoms; ++a) {
    double prev = 2.0;
    for (int i = 0; i < n; ++i) {
      const double u = std::pow(10.0, -6.0 + 12.0 * i / (n - 1));
      const double q = spec.q(a, u);
      if (!(q >= 0.0 && q <= 1.0 + 1e-12)) throw DomainError("tempering: q outside [0,1] at u=" + std::to_string(u));
      if (q > prev + 1e-12) throw DomainError("tempering: q increases near u=" + std::to_string(u));
      prev = q;
    }
  }
}

// ------------------------------------------------------------------ Rosinski

RosinskiMeasure::RosinskiMeasure(double alpha, double p, std::vector<RosinskiAtom> atoms)
    : alpha_(alpha), p_(p), atoms_(std::move(atoms)) {
  if (!(alpha > 0 && alpha < 2)) throw DomainError("Rosinski measure: alpha must lie in (0,2)");
  if (!(p > 0)) throw DomainError("Rosinski measure: p must be positive");
  if (atoms_.empty()) throw DomainError("Rosinski measure: no atoms");
  for (const auto& a : atoms_) {
    if (!(norm2(a.x) > 0)) throw DomainError("Rosinski measure: mass at the origin");
    if (!(a.weight > 0) || !std::isfinite(a.weight)) throw DomainError("Rosinski measure: weights must be positive");
  }
}

RosinskiMeasure::RosinskiMeasure(double alpha, double p, std::vector<RosinskiRadial> radials)
    : alpha_(alpha), p_(p), radials_(std::move(radials)) {
  if (!(alpha > 0 && alpha < 2)) throw DomainError("Rosinski measure: alpha must lie in (0,2)");
  if (!(p > 0)) throw DomainError("Rosinski measure: p must be positive");
  if (radials_.empty()) throw DomainError("Rosinski measure: no radial components");
}

namespace {

double radial_moment(const RosinskiRadial& r, double order) {
  quad::Options opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-12;
  auto res = quad::half_line([&](double u) { return std::pow(u, order) * r.density(u); }, opt, r.scale);
  return res.converged ? res.value : std::numeric_limits<double>::infinity();
}

}  // namespace

double RosinskiMeasure::total_mass() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.weight;
  for (const auto& r : radials_) s += radial_moment(r, 0.0);
  return s;
}

double RosinskiMeasure::alpha_moment() const {
  double s = 0;
  for (const auto& a : atoms_) s += std::pow(norm2(a.x), alpha_) * a.weight;
  for (const auto& r : radials_) s += radial_moment(r, alpha_);
  return s;
}

RosinskiDecomposition decompose_rosinski(const RosinskiMeasure& R) {
  const double alpha = R.alpha(), p = R.p();
  std::vector<SphericalAtom> atoms;
  std::vector<RadialMixture> mixtures;
  if (R.is_atomic()) {
    std::vector<std::vector<double>> pos, wt;
    for (const auto& a : R.atoms()) {
      const double r = norm2(a.x);
      Direction xi = Direction::normalized(a.x);
      const double w = std::pow(r, alpha) * a.weight;
      std::size_t idx = atoms.size();
      for (std::size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].direction.approx_equal(xi)) idx = i;
      if (idx == atoms.size()) {
        atoms.push_back({xi, 0.0});
        pos.emplace_back();
        wt.emplace_back();
      }
      atoms[idx].weight += w;
      pos[idx].push_back(std::pow(r, -p));
      wt[idx].push_back(w);
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (double& w : wt[i]) w /= atoms[i].weight;
      mixtures.push_back(RadialMixture::discrete(pos[i], wt[i]));
    }
    return {SphericalMeasure(std::move(atoms)), std::move(mixtures)};
  }
  for (const auto& r : R.radials()) {
    const double sig = radial_moment(r, alpha);
    if (!(sig > 0) || !std::isfinite(sig)) throw DomainError("Rosinski measure: alpha-moment must be finite and positive");
    auto dens = r.density;
    auto qpdf = [dens, alpha, p, sig](double s) {
      const double u = std::pow(s, -1.0 / p);
      return std::pow(u, alpha + 1.0) * dens(u) / (p * s * sig);
    };
    RadialMixture::DensityInfo info;
    info.strip = r.strip * p;
    info.scale = std::pow(r.scale, -p);
    atoms.push_back({r.direction, sig});
    mixtures.push_back(RadialMixture::density(qpdf, alpha / p, info));
  }
  return {SphericalMeasure(std::move(atoms)), std::move(mixtures)};
}

RosinskiMeasure compose_rosinski(const SphericalMeasure& sigma, const std::vector<RadialMixture>& mixtures, double alpha,
                                 double p) {
  if (mixtures.size() != sigma.size()) throw DomainError("compose: one mixture per spherical atom required");
  std::vector<RosinskiAtom> out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const auto& m = mixtures[i];
    if (!m.is_discrete()) throw DomainError("compose: only discrete mixtures can be composed");
    const auto& xi = sigma[i].direction;
    for (std::size_t j = 0; j < m.atom_positions().size(); ++j) {
      const double s = m.atom_positions()[j];
      const double r = std::pow(s, -1.0 / p);
      std::vector<double> x(xi.coords().begin(), xi.coords().end());
      for (double& c : x) c *= r;
      out.push_back({std::move(x), sigma[i].weight * m.atom_weights()[j] * std::pow(s, alpha / p)});
    }
  }
  return RosinskiMeasure(alpha, p, std::move(out));
}

}  // namespace tsou
