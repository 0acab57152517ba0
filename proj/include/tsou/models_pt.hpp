#pragma once

#include <memory>
#include <vector>

#include "tsou/jump_law.hpp"
#include "tsou/model.hpp"
#include "tsou/validation.hpp"

namespace tsou {

// Power tempered stable PT_alpha(ell, c): Rosinski density A(1+|x|)^{-2-alpha-ell}.
struct PtParams {
  double alpha;
  double ell;
  double c;
  double A;  // c (alpha+ell+1) alpha / Gamma(1-alpha)
  double B;  // int_0^inf (1+x)^{-2-alpha-ell} x^ell dx = Beta(ell+1, alpha+1)

  PtParams(double alpha, double ell, double c = 1.0);
};

// int_0^inf (1+x)^{-2-alpha-ell} x^e dx by quadrature
double pt_power_integral(double alpha, double ell, double exponent);

double pt_levy_mass(const PtParams& p);  // R(R) = 2 c alpha / Gamma(1-alpha)
SphericalMeasure pt_sigma(const PtParams& p);
TsLaw pt_build(const PtParams& p);
TsouModel pt_model(const PtParams& p, double lambda);
RosinskiMeasure pt_rosinski(const PtParams& p);

// Specialized jump-law formulas for both directions (f does not depend on xi).
double pt_f_xi_prefactor(const PtParams& p, double lambda, double t);
double pt_f_xi_pdf(const PtParams& p, double lambda, double t, double u);
double pt_envelope_scale(const PtParams& p, double lambda, double t);  // max{1, (e^{lt}-1) Beta(ell+2,alpha)/B}
double pt_v1(const PtParams& p, double lambda, double t);
double pt_phi1(const PtParams& p, double lambda, double t, double u);
JumpLaw pt_jumplaw(const PtParams& p, double lambda, double t);

// X = sum_j X_j s_j with X_j iid PT_alpha(ell, c): sigma has weight AB on each of +-s_j.
struct PtMultivariate {
  std::vector<Direction> generators;  // s_1..s_k
  PtParams params;

  PtMultivariate(std::vector<Direction> generators, PtParams params);
  std::size_t dimension() const { return generators.front().dim(); }
};

TsLaw pt_multivariate_build(const PtMultivariate& pm);
TsouModel pt_multivariate_model(const PtMultivariate& pm, double lambda);
// The c for which every sigma atom has unit weight (AB = 1).
double pt_unit_weight_c(double alpha, double ell);

// Density and cdf of PT_alpha(ell, c) by CF inversion.
class PtReferenceDensity {
 public:
  explicit PtReferenceDensity(const PtParams& p, InversionOptions options = {});
  double operator()(double x) const { return inverter_.density(x); }
  double cdf(double x) const { return inverter_.cdf(x); }
  const CfInverter& inverter() const { return inverter_; }

 private:
  CfInverter inverter_;
};

// Real log-CF of PT_alpha(ell, c) from the mixture table of Q_xi.
double pt_log_cf(const PtParams& p, const RadialMixture& Q, double z);
CfHandle pt_cf(const PtParams& p);
double pt_reference_density(const PtParams& p, double x);

}  // namespace tsou
