#include "tsou/validation.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "tsou/error.hpp"

namespace tsou {

CfHandle CfHandle::univariate(std::function<cplx(double)> f, double scale) {
  CfHandle h;
  h.cf = [f = std::move(f)](std::span<const double> z) { return f(z[0]); };
  h.dimension = 1;
  h.scale = scale;
  return h;
}

cplx CfHandle::operator()(double z) const {
  const double zz[1] = {z};
  return cf(zz);
}

namespace {

constexpr int kGauss = 16;

void add_panel(double a, double b, std::vector<double>& z, std::vector<double>& w) {
  using GL = boost::math::quadrature::gauss<double, kGauss>;
  const auto& x = GL::abscissa();
  const auto& wt = GL::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) {
      z.push_back(c);
      w.push_back(h * wt[i]);
      continue;
    }
    z.push_back(c - h * x[i]);
    w.push_back(h * wt[i]);
    z.push_back(c + h * x[i]);
    w.push_back(h * wt[i]);
  }
}

}  // namespace

CfInverter::CfInverter(const CfHandle& cf, InversionOptions opt) : x_max_(opt.x_max) {
  if (!(opt.x_max > 0)) throw DomainError("cf inversion: x_max must be positive");
  if (cf.dimension != 1) throw DomainError("cf inversion: univariate CF required");
  if (!(cf.scale > 0)) throw DomainError("cf inversion: scale must be positive");
  const double z0 = 1.0 / cf.scale;
  if (opt.z_max > 0) {
    z_star_ = opt.z_max;
  } else {
    // doubling search; several probes per octave so a zero of an oscillating
    // CF is not mistaken for decay
    double Z = z0;
    int k = 0;
    for (;; ++k) {
      if (k > opt.max_doublings)
        throw NumericError("cf inversion: |CF| does not fall below " + std::to_string(opt.tail_threshold) +
                           " (last Z = " + std::to_string(Z) + ")");
      bool small = true;
      for (double f : {1.0, 1.25, 1.5, 1.75, 2.0}) small = small && std::abs(cf(Z * f)) < opt.tail_threshold;
      if (small) break;
      Z *= 2;
    }
    z_star_ = Z;
  }
  const double h = std::min(0.5 * z0, 2 * std::numbers::pi / std::max(opt.x_max, 1e-300));
  // graded panels resolve cusps like |z|^alpha at the origin
  double a = h * 0x1.0p-30;
  if (a < z_star_) add_panel(0.0, a, z_, w_);
  while (2 * a < std::min(h, z_star_)) {
    add_panel(a, 2 * a, z_, w_);
    a *= 2;
  }
  const std::size_t n = static_cast<std::size_t>(std::ceil((z_star_ - a) / h));
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = a + (z_star_ - a) * static_cast<double>(i) / static_cast<double>(n);
    const double hi = a + (z_star_ - a) * static_cast<double>(i + 1) / static_cast<double>(n);
    add_panel(lo, hi, z_, w_);
  }
  phi_.resize(z_.size());
  for (std::size_t i = 0; i < z_.size(); ++i) {
    phi_[i] = cf(z_[i]);
    if (!std::isfinite(phi_[i].real()) || !std::isfinite(phi_[i].imag()))
      throw NumericError("cf inversion: CF is not finite at z = " + std::to_string(z_[i]));
  }
}

void CfInverter::check_x(double x) const {
  if (!(std::fabs(x) <= x_max_ * (1 + 1e-12)))
    throw DomainError("cf inversion: |x| = " + std::to_string(std::fabs(x)) + " exceeds the resolved range " +
                      std::to_string(x_max_));
}

double CfInverter::density(double x) const {
  check_x(x);
  // f(x) = (1/pi) int_0^Z Re(e^{-izx} CF(z)) dz
  double acc = 0;
  for (std::size_t i = 0; i < z_.size(); ++i) {
    const double c = std::cos(z_[i] * x), s = std::sin(z_[i] * x);
    acc += w_[i] * (c * phi_[i].real() + s * phi_[i].imag());
  }
  return acc / std::numbers::pi;
}

double CfInverter::cdf(double x) const {
  check_x(x);
  // F(x) = 1/2 - (1/pi) int_0^Z Im(e^{-izx} CF(z)) / z dz
  double acc = 0;
  for (std::size_t i = 0; i < z_.size(); ++i) {
    const double c = std::cos(z_[i] * x), s = std::sin(z_[i] * x);
    acc += w_[i] * (c * phi_[i].imag() - s * phi_[i].real()) / z_[i];
  }
  return 0.5 - acc / std::numbers::pi;
}

std::vector<double> CfInverter::density(std::span<const double> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(density(x));
  return out;
}

std::vector<double> cf_invert(const CfHandle& cf, std::span<const double> xs, InversionOptions options) {
  double xm = 0;
  for (double x : xs) xm = std::max(xm, std::fabs(x));
  options.x_max = std::max(options.x_max, xm);
  return CfInverter(cf, options).density(xs);
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  const std::size_t n = samples.size();
  if (n < 10) throw DomainError("ks statistic: need at least 10 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  double D = 0;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double F = cdf(s[i]);
    D = std::max({D, static_cast<double>(i + 1) / dn - F, F - static_cast<double>(i) / dn});
  }
  return std::clamp(D, 0.0, 1.0);
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 10 || b.size() < 10) throw DomainError("two-sample ks: need at least 10 samples each");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double D = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    D = std::max(D, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return D;
}

double ks_critical(double n_eff, double level) {
  // c(level) = sqrt(-log((1 - level)/2) / 2)
  return std::sqrt(-0.5 * std::log(0.5 * (1.0 - level))) / std::sqrt(n_eff);
}

cplx empirical_cf(std::span<const double> samples, std::size_t d, std::span<const double> z) {
  if (d == 0 || z.size() != d || samples.size() % d != 0) throw DomainError("empirical CF: dimension mismatch");
  const std::size_t n = samples.size() / d;
  if (n == 0) throw DomainError("empirical CF: no samples");
  double re = 0, im = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double arg = 0;
    for (std::size_t j = 0; j < d; ++j) arg += z[j] * samples[k * d + j];
    re += std::cos(arg);
    im += std::sin(arg);
  }
  return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

double ecf_distance(std::span<const double> samples, const CfHandle& cf, std::span<const std::vector<double>> zs) {
  if (zs.empty()) throw DomainError("ecf distance: empty z grid");
  double worst = 0;
  for (const auto& z : zs) {
    bool zero = true;
    for (double v : z) zero = zero && v == 0;
    if (zero) continue;  // both sides are exactly 1
    worst = std::max(worst, std::abs(empirical_cf(samples, cf.dimension, z) - cf(z)));
  }
  return worst;
}

double ecf_distance(std::span<const double> samples, const CfHandle& cf, std::span<const double> zs) {
  std::vector<std::vector<double>> grid;
  for (double z : zs) grid.push_back({z});
  return ecf_distance(samples, cf, grid);
}

EnvelopeScan envelope_scan(const std::function<double(double)>& f, double V, const std::function<double(double)>& g,
                           std::span<const double> grid) {
  EnvelopeScan r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()};
  for (double u : grid) {
    if (!(u > 0)) throw DomainError("envelope scan: grid must lie in (0, inf)");
    const double slack = V * g(u) - f(u);
    if (slack < r.worst_slack || std::isnan(slack)) {
      r.worst_slack = slack;
      r.worst_u = u;
      if (std::isnan(slack)) break;
    }
  }
  return r;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw DomainError("log grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw DomainError("linear grid: need lo < hi and n >= 2");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("bandwidth: need at least 2 samples");
  std::vector<double> s(samples.begin(), samples.end());
  double mean = 0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double v : s) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  std::sort(s.begin(), s.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double fr = pos - static_cast<double>(i);
    return i + 1 < n ? s[i] * (1 - fr) + s[i + 1] * fr : s[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  // heavy tails inflate sd, so the robust spread usually wins
  double spread = std::min(sd, iqr / 1.349);
  if (!(spread > 0)) spread = sd > 0 ? sd : 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> kde(std::span<const double> samples, std::span<const double> xs, double bw) {
  if (samples.empty() || !(bw > 0)) throw DomainError("kde: need samples and a positive bandwidth");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double norm = 1.0 / (static_cast<double>(s.size()) * bw * std::sqrt(2 * std::numbers::pi));
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    // the Gaussian kernel is negligible beyond 9 bandwidths
    auto lo = std::lower_bound(s.begin(), s.end(), x - 9 * bw);
    auto hi = std::upper_bound(s.begin(), s.end(), x + 9 * bw);
    double acc = 0;
    for (auto it = lo; it != hi; ++it) {
      const double r = (x - *it) / bw;
      acc += std::exp(-0.5 * r * r);
    }
    out.push_back(acc * norm);
  }
  return out;
}

}  // namespace tsou
