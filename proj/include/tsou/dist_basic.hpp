#pragma once

#include "tsou/rng.hpp"

namespace tsou {

// Beta/Pareto mixture: power-law body x^{p-alpha-1} on (0, delta], Pareto tail beyond.
struct MllParams {
  double alpha;
  double p;
  double delta;
  double h;  // mass of the body

  MllParams(double alpha, double p, double delta);
};

double mll_pdf(double x, const MllParams& m);
double mll_cdf(double x, const MllParams& m);
double mll_sample(const MllParams& m, RngStream& rng);

// Density p theta^{beta/p} / Gamma(beta/p) u^{beta-1} exp(-theta u^p).
struct GgaParams {
  double beta;
  double p;
  double theta;

  GgaParams(double beta, double p, double theta);
};

double gga_pdf(double u, const GgaParams& g);
double gga_cdf(double u, const GgaParams& g);
double gga_sample(const GgaParams& g, RngStream& rng);

// Gamma(shape, rate)
double gamma_sample(double shape, double rate, RngStream& rng);
std::uint64_t poisson_sample(double mean, RngStream& rng);

// One-sided stable S with E exp(-l S) = exp(weight * Gamma(-alpha) * l^alpha).
double positive_stable_sample(double alpha, double weight, RngStream& rng);

}  // namespace tsou
