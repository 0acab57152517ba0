#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tsou/error.hpp"

namespace tsou::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_panels = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0;
  bool converged = false;
  std::size_t evaluations = 0;
};

inline double magnitude(double x) { return std::fabs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

// Throws when the integrator gave up; `what` names the quantity for the message.
template <class T>
T value_or_throw(const Result<T>& r, const char* what) {
  if (!r.converged || !std::isfinite(magnitude(r.value)))
    throw NumericError(std::string("quadrature did not converge: ") + what);
  return r.value;
}

namespace detail {

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk21(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  // For the 10-point Gauss rule the Gauss nodes sit at the odd Kronrod indices.
  T fc = f(c);
  T kron = fc * wk[0];
  T gauss = T{};
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T s = f(c - h * x[i]) + f(c + h * x[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

}  // namespace detail

// Global adaptive 21-point Gauss-Kronrod over the partition given by `points`
// (sorted, at least two). The worst panel is bisected until the summed error
// estimate meets max(abs_tol, rel_tol * |I|).
template <class F>
auto adaptive(F&& f, std::span<const double> points, const Options& opt = {})
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  Result<T> res;
  if (points.size() < 2) return res;
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto p = detail::gk21<T>(f, points[i], points[i + 1]);
    res.evaluations += 21;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  while (!heap.empty()) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * magnitude(total))) {
      res.converged = true;
      break;
    }
    if (heap.size() >= opt.max_panels) break;
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel cannot be split further
    heap.pop();
    auto l = detail::gk21<T>(f, worst.a, mid);
    auto r = detail::gk21<T>(f, mid, worst.b);
    res.evaluations += 42;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Recompute the sums from the panels to shed accumulated rounding.
  T fresh{};
  double ferr = 0;
  while (!heap.empty()) {
    fresh += heap.top().value;
    ferr += heap.top().error;
    heap.pop();
  }
  res.value = fresh;
  res.error = ferr;
  if (!res.converged) res.converged = ferr <= std::max(opt.abs_tol, opt.rel_tol * magnitude(fresh));
  return res;
}

template <class F>
auto finite(F&& f, double a, double b, const Options& opt = {}) {
  const double pts[2] = {a, b};
  return adaptive(std::forward<F>(f), std::span<const double>(pts, 2), opt);
}

template <class F>
auto finite(F&& f, std::initializer_list<double> pts, const Options& opt = {}) {
  std::vector<double> v(pts);
  std::sort(v.begin(), v.end());
  return adaptive(std::forward<F>(f), std::span<const double>(v), opt);
}

// Integral over (lo, hi) with lo >= 0 and possibly hi = +inf, computed in
// v = log(u). The v-range is found by probing outward from log(scale) until the
// transformed integrand is negligible and not growing, so a start far outside
// the bulk (an underflowed tempering factor, say) keeps walking. A range search that never finds decay
// is reported as non-converged with value +inf magnitude.
template <class F>
auto half_line(F&& f, const Options& opt = {}, double scale = 1.0, double lo = 0.0,
               double hi = std::numeric_limits<double>::infinity())
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  auto g = [&](double v) -> T {
    const double u = std::exp(v);
    return f(u) * u;
  };
  const double vlo_cap = lo > 0 ? std::log(lo) : -745.0;
  const double vhi_cap = std::isfinite(hi) ? std::log(hi) : 709.0;
  double centre = std::log(scale > 0 ? scale : 1.0);
  centre = std::clamp(centre, vlo_cap, vhi_cap);
  double peak = magnitude(g(centre));
  const double step = 1.0;
  auto negligible = [&](double m) { return m <= std::max(1e-3 * opt.abs_tol, 1e-17 * peak); };

  auto probe = [&](double dir, double cap) {
    double v = centre;
    double prev = magnitude(g(centre));
    int quiet = 0;
    for (int i = 0; i < 1500; ++i) {
      const double nv = v + dir * step;
      if ((dir > 0 && nv >= cap) || (dir < 0 && nv <= cap)) return std::pair{cap, true};
      v = nv;
      const double m = magnitude(g(v));
      if (!std::isfinite(m)) return std::pair{v, false};
      peak = std::max(peak, m);
      quiet = negligible(m) && peak > 0 && m <= prev ? quiet + 1 : 0;
      prev = m;
      if (quiet >= 3) return std::pair{v, true};
    }
    return std::pair{v, false};
  };
  const auto [vhi, ok_hi] = probe(+1, vhi_cap);
  const auto [vlo, ok_lo] = probe(-1, vlo_cap);
  Result<T> res;
  if (!ok_hi || !ok_lo) {
    res.value = T{std::numeric_limits<double>::infinity()};
    res.converged = false;
    return res;
  }
  std::vector<double> pts;
  const double width = 2.0;
  for (double v = vlo; v < vhi; v += width) pts.push_back(v);
  pts.push_back(vhi);
  return adaptive(g, std::span<const double>(pts), opt);
}

// Composite trapezoid rule in log-space on the fixed grid v_k = k*h. Exact up
// to exponentially small terms for integrands analytic in a strip about the real
// v-axis. The table stores nodes s_k = exp(v_k) and weights h*s_k*density(s_k).
struct LogTrapezoidTable {
  double h = 0;
  int k_min = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  bool empty() const { return nodes.empty(); }
};

}  // namespace tsou::quad
