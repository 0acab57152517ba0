#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsou/tempering.hpp"

namespace tsou {

// TS_{alpha,d}(sigma, q, b)
struct TsLaw {
  double alpha;
  SphericalMeasure sigma;
  TemperingSpec tempering;
  std::vector<double> shift;  // b; empty means zero

  TsLaw(double alpha, SphericalMeasure sigma, TemperingSpec tempering, std::vector<double> shift = {});

  std::size_t dimension() const { return sigma.dimension(); }
  double q(std::size_t atom, double u) const { return tempering.q(atom, u); }
  // Same tempering, different spherical measure; skips the A1/A2 grid.
  TsLaw with_sigma(SphericalMeasure s, std::vector<double> new_shift = {}) const;

 private:
  struct Unchecked {};
  TsLaw(Unchecked, double alpha, SphericalMeasure sigma, TemperingSpec tempering, std::vector<double> shift);
};

struct TsouModel {
  TsLaw law;
  double lambda;

  TsouModel(TsLaw law, double lambda);
  double alpha() const { return law.alpha; }
  std::size_t dimension() const { return law.dimension(); }
};

// K is a typed outcome: finite value or infinite.
struct KValue {
  bool infinite = false;
  double value = 0;
  static KValue finite(double v) { return {false, v}; }
  static KValue infinity() { return {true, 0.0}; }
};

double q_eval(const TsLaw& law, const Direction& xi, double u);

// alpha^{-1} Gamma(1 - alpha/p) (kappa^{alpha/p} - 1)
double lemma3_integral(double alpha, double p, double kappa);

KValue compute_K(const TsouModel& model, double t);
// Sum over atoms of w * int (q(u) - q(u e^{lambda t})) u^{-1-alpha} du by adaptive quadrature.
double compute_K_quadrature(const TsouModel& model, double t);

struct ClassFCertificate {
  double epsilon = 0;
  std::vector<double> M;
  std::vector<double> p;
  bool valid = false;
  std::string reason;
};

ClassFCertificate check_class_f(const TsouModel& model, double t);

// Rejects lambda*t*scale beyond the exp overflow threshold.
double checked_exp(double x, const char* what);

}  // namespace tsou
