#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace tsou {

using cplx = std::complex<double>;

// Characteristic function z -> E e^{i<z,X>} plus hints for inversion.
struct CfHandle {
  std::function<cplx(std::span<const double>)> cf;
  std::size_t dimension = 1;
  double scale = 1.0;  // rough spread of X; sets the first panel width in z

  static CfHandle univariate(std::function<cplx(double)> f, double scale = 1.0);
  cplx operator()(double z) const;
  cplx operator()(std::span<const double> z) const { return cf(z); }
};

struct InversionOptions {
  double tail_threshold = 1e-8;  // |CF| below this beyond Z*
  double z_max = 0;              // > 0 fixes Z* instead of searching
  double x_max = 10;             // largest |x| the node set must resolve
  int max_doublings = 40;
};

// Density and cdf of a univariate law from its CF. The CF is sampled once on
// composite 16-point Gauss-Legendre panels over [0, Z*]: geometric panels
// near the origin, then panels no wider than one period of e^{-izx}.
class CfInverter {
 public:
  explicit CfInverter(const CfHandle& cf, InversionOptions options = {});

  double z_star() const { return z_star_; }
  double x_max() const { return x_max_; }
  std::size_t nodes() const { return z_.size(); }
  // Both throw DomainError for |x| > x_max(), where the nodes stop resolving e^{-izx}.
  double density(double x) const;
  double cdf(double x) const;  // Gil-Pelaez
  std::vector<double> density(std::span<const double> xs) const;

 private:
  void check_x(double x) const;

  double z_star_;
  double x_max_;
  std::vector<double> z_, w_;
  std::vector<cplx> phi_;
};

std::vector<double> cf_invert(const CfHandle& cf, std::span<const double> xs, InversionOptions options = {});

// Exact sup distance between the empirical cdf and `cdf`. Requires n >= 10.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
double two_sample_ks(std::span<const double> a, std::span<const double> b);
// Asymptotic Kolmogorov critical value c(level)/sqrt(n_eff).
double ks_critical(double n_eff, double level = 0.99);

// max_z |(1/n) sum_j e^{i<z,X_j>} - CF(z)|. Samples are row-major, d per row.
double ecf_distance(std::span<const double> samples, const CfHandle& cf, std::span<const std::vector<double>> zs);
double ecf_distance(std::span<const double> samples, const CfHandle& cf, std::span<const double> zs);
cplx empirical_cf(std::span<const double> samples, std::size_t dimension, std::span<const double> z);

struct EnvelopeScan {
  double worst_slack;  // min over the grid of V g(u) - f(u)
  double worst_u;
};
EnvelopeScan envelope_scan(const std::function<double(double)>& f, double V, const std::function<double(double)>& g,
                           std::span<const double> grid);

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

double silverman_bandwidth(std::span<const double> samples);
std::vector<double> kde(std::span<const double> samples, std::span<const double> xs, double bandwidth);

}  // namespace tsou
