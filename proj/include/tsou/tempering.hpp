#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsou/error.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

class Direction {
 public:
  // Throws unless |v| = 1 within 1e-12.
  explicit Direction(std::vector<double> v);
  static Direction normalized(std::vector<double> v);

  std::size_t dim() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> coords() const { return v_; }
  double dot(std::span<const double> z) const;
  bool approx_equal(const Direction& o, double tol = 1e-12) const;

 private:
  std::vector<double> v_;
};

struct SphericalAtom {
  Direction direction;
  double weight;
};

// Finite atomic measure on the unit sphere.
class SphericalMeasure {
 public:
  SphericalMeasure() = default;
  explicit SphericalMeasure(std::vector<SphericalAtom> atoms);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<SphericalAtom>& atoms() const { return atoms_; }
  const SphericalAtom& operator[](std::size_t i) const { return atoms_[i]; }
  double total_mass() const;
  SphericalMeasure scaled(double factor) const;
  std::optional<std::size_t> find(const Direction& xi, double tol = 1e-12) const;

 private:
  std::vector<SphericalAtom> atoms_;
  std::size_t dim_ = 0;
};

struct MixtureMoments {
  double mass = 0;
  double first = 0;       // integral of s; +inf when divergent
  double fractional = 0;  // integral of s^fractional_order
  double fractional_order = 0;
};

struct MixtureDensityInfo {
  double support_lower = 0;
  // Half-width of a strip |Im log s| < strip in which s*pdf(s) is analytic
  // and decays. Zero means unknown and disables the table.
  double strip = 0;
  // Characteristic scale, used to centre adaptive range searches.
  double scale = 1;
  std::optional<MixtureMoments> moments;
};

// A measure Q on (0, inf): a finite list of atoms, or a density. Densities
// declared analytic in log-space get a precomputed log-trapezoid table, which
// is what the sampler hot loops use.
class RadialMixture {
 public:
  using Moments = MixtureMoments;
  using DensityInfo = MixtureDensityInfo;

  static RadialMixture point(double s, double weight = 1.0);
  static RadialMixture discrete(std::vector<double> s, std::vector<double> w);
  static RadialMixture density(std::function<double(double)> pdf, double fractional_order, DensityInfo info = DensityInfo());

  bool is_discrete() const { return !pdf_; }
  const std::vector<double>& atom_positions() const { return s_; }
  const std::vector<double>& atom_weights() const { return w_; }
  double pdf(double s) const;
  double support_lower() const { return lower_; }
  const Moments& moments() const { return moments_; }
  double fractional_moment(double order) const;
  const quad::LogTrapezoidTable& table() const { return table_; }
  RadialMixture normalized() const;

  // Integral of g against Q. For density mixtures without a table this is an
  // adaptive quadrature; `scale` hints where g varies.
  template <class G>
  auto integrate(G&& g, double scale = 1.0) const -> std::decay_t<std::invoke_result_t<G&, double>>;

  double laplace(double x) const;                     // int exp(-x s) Q(ds)
  double laplace_complement(double x) const;          // int (1 - exp(-x s)) Q(ds)
  double laplace_difference(double x, double kappa) const;  // int (exp(-x s) - exp(-x s kappa)) Q(ds)

 private:
  void build_table(double strip);
  void compute_moments(double fractional_order);

  std::vector<double> s_, w_;
  std::function<double(double)> pdf_;
  double lower_ = 0;
  double scale_ = 1;
  Moments moments_;
  quad::LogTrapezoidTable table_;
};

// Q-density of the power tempered family: (1/B) s^ell (1+s)^{-2-alpha-ell}.
RadialMixture power_tempered_mixture(double alpha, double ell);

struct ConstantOne {};
struct HardTruncation {
  std::vector<double> gamma;
};
struct Classical {
  std::vector<double> zeta;
  double p = 1.0;
};
struct PTemperedMixture {
  std::vector<RadialMixture> mixtures;
  double p = 1.0;
};
struct PowerTempered {
  double alpha;
  double ell;
  double c = 1.0;  // scales sigma only; q does not depend on it
};

// Per-atom entries are matched to sigma atoms by index; a single entry is
// shared by every atom.
class TemperingSpec {
 public:
  using Variant = std::variant<ConstantOne, HardTruncation, Classical, PTemperedMixture, PowerTempered>;

  TemperingSpec() : TemperingSpec(ConstantOne{}) {}
  TemperingSpec(Variant v);
  TemperingSpec(ConstantOne v) : TemperingSpec(Variant(v)) {}
  TemperingSpec(HardTruncation v) : TemperingSpec(Variant(std::move(v))) {}
  TemperingSpec(Classical v) : TemperingSpec(Variant(std::move(v))) {}
  TemperingSpec(PTemperedMixture v) : TemperingSpec(Variant(std::move(v))) {}
  TemperingSpec(PowerTempered v) : TemperingSpec(Variant(v)) {}

  const Variant& variant() const { return v_; }
  std::string name() const;
  // Number of per-atom entries; 1 means shared, 0 means no per-atom data.
  std::size_t entries() const;

  double q(std::size_t atom, double u) const;
  // 1 - q, accurate when q is close to 1.
  double q_complement(std::size_t atom, double u) const;
  // q(u) - q(u * kappa) for kappa >= 1, without cancellation at small u.
  double q_difference(std::size_t atom, double u, double kappa) const;

  bool is_p_tempered() const;
  double p() const;  // throws unless p-tempered
  const RadialMixture& mixture(std::size_t atom) const;
  double hard_gamma(std::size_t atom) const;

 private:
  Variant v_;
  std::vector<RadialMixture> mixtures_;
};

// A1/A2 on a log-grid over [1e-6, 1e6]; throws DomainError on violation.
void check_tempering_assumptions(const TemperingSpec& spec, std::size_t n_atoms);

struct RosinskiAtom {
  std::vector<double> x;
  double weight;
};

// R restricted to the ray {u xi : u > 0} has density `density(u)` in u.
struct RosinskiRadial {
  Direction direction;
  std::function<double(double)> density;
  double strip = 0;  // analyticity half-width of u*density(u) in log u, 0 if unknown
  double scale = 1;
};

class RosinskiMeasure {
 public:
  RosinskiMeasure(double alpha, double p, std::vector<RosinskiAtom> atoms);
  RosinskiMeasure(double alpha, double p, std::vector<RosinskiRadial> radials);

  double alpha() const { return alpha_; }
  double p() const { return p_; }
  bool is_atomic() const { return radials_.empty(); }
  const std::vector<RosinskiAtom>& atoms() const { return atoms_; }
  const std::vector<RosinskiRadial>& radials() const { return radials_; }
  double total_mass() const;
  double alpha_moment() const;  // int |x|^alpha R(dx)

 private:
  double alpha_, p_;
  std::vector<RosinskiAtom> atoms_;
  std::vector<RosinskiRadial> radials_;
};

struct RosinskiDecomposition {
  SphericalMeasure sigma;
  std::vector<RadialMixture> mixtures;  // probability measures, one per sigma atom
};

RosinskiDecomposition decompose_rosinski(const RosinskiMeasure& r);
// Inverse map for discrete mixtures.
RosinskiMeasure compose_rosinski(const SphericalMeasure& sigma, const std::vector<RadialMixture>& mixtures,
                                 double alpha, double p);

// ------------------------------------------------------------------ templates

template <class G>
auto RadialMixture::integrate(G&& g, double scale) const -> std::decay_t<std::invoke_result_t<G&, double>> {
  using T = std::decay_t<std::invoke_result_t<G&, double>>;
  T acc{};
  if (is_discrete()) {
    for (std::size_t i = 0; i < s_.size(); ++i) acc += w_[i] * g(s_[i]);
    return acc;
  }
  if (!table_.empty()) {
    for (std::size_t k = 0; k < table_.nodes.size(); ++k) acc += table_.weights[k] * g(table_.nodes[k]);
    return acc;
  }
  auto f = [&](double s) -> T { return g(s) * pdf_(s); };
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  auto r = quad::half_line(f, opt, scale > 0 ? scale : scale_, lower_);
  return quad::value_or_throw(r, "radial mixture integral");
}

}  // namespace tsou
