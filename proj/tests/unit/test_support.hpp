#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tsou/quadrature.hpp"

namespace tsou::testing {

// Cdf of a density on (0, inf), tabulated on a log grid by panel quadrature
// and interpolated linearly. `mass_below_lo` is the cdf at lo.
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, std::size_t n, double mass_below_lo = 0)
      : lo_(lo), hi_(hi) {
    const double r = std::log(hi / lo) / static_cast<double>(n - 1);
    quad::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-12;
    double acc = mass_below_lo;
    u_.push_back(lo);
    F_.push_back(acc);
    for (std::size_t i = 1; i < n; ++i) {
      const double a = u_.back(), b = lo * std::exp(r * static_cast<double>(i));
      acc += quad::value_or_throw(quad::finite(pdf, a, b, opt), "tabulated cdf");
      u_.push_back(b);
      F_.push_back(acc);
    }
  }
  double total() const { return F_.back(); }
  double operator()(double x) const {
    if (x <= lo_) return F_.front();
    if (x >= hi_) return F_.back();
    const auto it = std::upper_bound(u_.begin(), u_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - u_.begin());
    const double w = std::log(x / u_[k - 1]) / std::log(u_[k] / u_[k - 1]);
    return F_[k - 1] + w * (F_[k] - F_[k - 1]);
  }

 private:
  double lo_, hi_;
  std::vector<double> u_, F_;
};

}  // namespace tsou::testing
