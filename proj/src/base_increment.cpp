#include "tsou/base_increment.hpp"

#include <cmath>
#include <limits>

#include "tsou/dist_basic.hpp"
#include "tsou/jump_law.hpp"

namespace tsou {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1))
    throw UnsupportedRegime("base increment: series sampler needs alpha in (0,1)");
}

constexpr double kSkipBound = 0.05;

// Failures before the first success of Bernoulli(b) trials; kept as a double
// because it can exceed any integer type when b is tiny.
double geometric_failures(RngStream& rng, double b) {
  if (!(b > 0)) return std::numeric_limits<double>::infinity();
  return std::floor(std::log(rng.uniform()) / std::log1p(-b));
}

}  // namespace

double truncation_error_bound(const BaseIncrementSpec& spec) {
  const double a = spec.law.alpha;
  require_alpha(a);
  return spec.law.sigma.total_mass() * std::pow(spec.trunc_eps, 1.0 - a) / (1.0 - a);
}

double compensated_residual_sd(const BaseIncrementSpec& spec) {
  const double a = spec.law.alpha;
  require_alpha(a);
  return std::sqrt(spec.law.sigma.total_mass() * std::pow(spec.trunc_eps, 2.0 - a) / (2.0 - a));
}

double error_measure(const BaseIncrementSpec& spec) {
  return spec.tail_compensation ? compensated_residual_sd(spec) : truncation_error_bound(spec);
}

BaseIncrementSpec make_base_spec(TsLaw law, double tolerance, bool tail_compensation) {
  const double a = law.alpha;
  require_alpha(a);
  if (!(tolerance > 0)) throw ConfigError("base increment: truncation tolerance must be positive");
  const double W = law.sigma.total_mass();
  const double eps = tail_compensation ? std::pow(tolerance * tolerance * (2.0 - a) / W, 1.0 / (2.0 - a))
                                       : std::pow(tolerance * (1.0 - a) / W, 1.0 / (1.0 - a));
  // shave a few ulps so the bound lands at or below the tolerance
  return BaseIncrementSpec{std::move(law), eps * (1.0 - 1e-12), tail_compensation, tolerance};
}

SeriesThinningSampler::SeriesThinningSampler(BaseIncrementSpec spec, double diagnostic_cutoff)
    : spec_(std::move(spec)), cutoff_(diagnostic_cutoff) {
  const auto& law = spec_.law;
  const double a = law.alpha;
  require_alpha(a);
  const double eps = spec_.trunc_eps;
  if (!(eps > 0) || !std::isfinite(eps)) throw ConfigError("base increment: trunc_eps must be positive");
  if (spec_.tolerance > 0 && error_measure(spec_) > spec_.tolerance * (1 + 1e-9))
    throw ConfigError("base increment: truncation error bound " + std::to_string(error_measure(spec_)) +
                      " exceeds the tolerance " + std::to_string(spec_.tolerance));
  const auto& tq = law.tempering;
  if (tq.is_p_tempered()) p_ = tq.p();
  quad::Options opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-10;
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    const double w = law.sigma[i].weight;
    Atom at{w, w * std::pow(eps, -a) / a, 0.0, 0.0, false};
    double comp = 0;
    // int_0^eps q(u) u^{-alpha} du
    const double full = std::pow(eps, 1.0 - a) / (1.0 - a);
    if (std::holds_alternative<ConstantOne>(tq.variant())) {
      at.always_keep = true;
      comp = full;
    } else if (std::holds_alternative<HardTruncation>(tq.variant())) {
      at.hard_gamma = tq.hard_gamma(i);
      comp = std::pow(std::min(eps, at.hard_gamma), 1.0 - a) / (1.0 - a);
    } else {
      if (tq.is_p_tempered()) {
        const double M = tq.mixture(i).moments().first;
        if (std::isfinite(M)) at.squeeze_M = M;
      }
      auto f = [&](double u) { return tq.q_complement(i, u) * std::pow(u, -a); };
      const double deficit = quad::value_or_throw(quad::half_line(f, opt, eps, 0.0, eps), "tail compensation");
      comp = full - deficit;
    }
    comp_.push_back(spec_.tail_compensation ? w * comp : 0.0);
    atoms_.push_back(at);
  }
}

void SeriesThinningSampler::add_sample(RngStream& rng, std::span<double> out, SeriesDiagnostics* diag) const {
  const auto& law = spec_.law;
  const double a = law.alpha;
  const double inv_a = -1.0 / a;
  const auto& tq = law.tempering;
  std::uint64_t kept = 0, thinned = 0, kept_above = 0, thinned_above = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& at = atoms_[i];
    // Each atom gets its own child stream, so its series does not depend on
    // how many terms the other atoms used.
    RngStream sub(rng.next_u64(), i);
    const double scale = a / at.weight;
    // Once the squeeze bound b(u) = M u^p drops below kSkipBound, only the
    // rare candidates for thinning get a uniform: candidates are found by
    // geometric skips at the current (decreasing) bound and then thinned down
    // to b(u). The draw sequence does not depend on eps.
    bool skipping = false;
    double b0 = 0;
    double skip = 0;
    double G = 0, sum = 0;
    for (;;) {
      G += sub.exponential();
      if (G > at.gamma_max) break;
      const double u = std::pow(scale * G, inv_a);
      bool keep;
      if (at.always_keep) {
        keep = true;
      } else if (at.hard_gamma > 0) {
        keep = u <= at.hard_gamma;
      } else if (!skipping) {
        const double v = sub.uniform();
        const double b = at.squeeze_M > 0 ? at.squeeze_M * (p_ == 1.0 ? u : std::pow(u, p_)) : 1.0;
        keep = (b < 1 && v <= 1.0 - b) || v <= tq.q(i, u);
        if (b < kSkipBound) {
          skipping = true;
          b0 = b;
          skip = geometric_failures(sub, b0);
        }
      } else if (skip >= 1) {
        skip -= 1;
        keep = true;
      } else {
        const double b = at.squeeze_M * (p_ == 1.0 ? u : std::pow(u, p_));
        keep = true;
        // given a candidate, v is uniform on (1 - b, 1]
        if (sub.uniform() * b0 < b) keep = 1.0 - b * sub.uniform() <= tq.q(i, u);
        b0 = b;
        skip = geometric_failures(sub, b0);
      }
      if (keep) {
        sum += u;
        ++kept;
        if (u > cutoff_) ++kept_above;
      } else {
        ++thinned;
        if (u > cutoff_) ++thinned_above;
      }
    }
    sum += comp_[i];
    const auto& xi = law.sigma[i].direction;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += sum * xi[j];
  }
  if (diag) {
    diag->kept += kept;
    diag->thinned += thinned;
    diag->kept_above += kept_above;
    diag->thinned_above += thinned_above;
    diag->truncation_bound = error_measure(spec_);
  }
}

std::vector<double> SeriesThinningSampler::sample(RngStream& rng, SeriesDiagnostics* diag) const {
  std::vector<double> out(dimension(), 0.0);
  add_sample(rng, out, diag);
  return out;
}

std::vector<double> series_thinning_sample(const BaseIncrementSpec& spec, RngStream& rng) {
  return SeriesThinningSampler(spec).sample(rng);
}

double esscher_tweedie_sample(double alpha, double zeta, double weight, RngStream& rng, std::uint64_t* iterations) {
  if (!(zeta >= 0) || !std::isfinite(zeta)) throw DomainError("Esscher sampler: zeta must be nonnegative");
  for (std::uint64_t it = 1; it <= kMaxRejectionIterations; ++it) {
    const double s = positive_stable_sample(alpha, weight, rng);
    const double u = rng.uniform();
    if (zeta == 0 || u <= std::exp(-zeta * s)) {
      if (iterations) *iterations = it;
      return s;
    }
  }
  throw NumericError("Esscher sampler: iteration cap reached");
}

}  // namespace tsou
