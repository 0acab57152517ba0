#include "tsou/ou_transition.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace tsou {

namespace {

void check_t(double t) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("transition: t must be positive");
}

}  // namespace

std::vector<double> transition_drift(const TsouModel& model, double t) {
  check_t(t);
  const auto& law = model.law;
  const double lt = model.lambda * t;
  std::vector<double> d(law.dimension(), 0.0);
  const double f = -std::expm1(-lt);
  for (std::size_t j = 0; j < law.shift.size(); ++j) d[j] = f * law.shift[j];
  if (law.alpha == 1.0) {
    // integration by parts of the two M-integrals leaves
    // -e^{-lambda t} sum_xi w xi int_1^{e^{lambda t}} q(xi,u) u^{-1} du
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-11;
    const double top = checked_exp(lt, "transition drift");
    for (std::size_t i = 0; i < law.sigma.size(); ++i) {
      auto g = [&](double v) { return law.q(i, std::exp(v)); };  // du/u = dv
      double val;
      if (std::holds_alternative<HardTruncation>(law.tempering.variant())) {
        const double gam = law.tempering.hard_gamma(i);
        val = gam <= 1.0 ? 0.0 : std::min(std::log(gam), lt);
      } else {
        val = quad::value_or_throw(quad::finite(g, 0.0, lt, opt), "alpha = 1 drift");
      }
      (void)top;
      const auto& xi = law.sigma[i].direction;
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= std::exp(-lt) * law.sigma[i].weight * xi[j] * val;
    }
  }
  return d;
}

std::vector<double> transition_psi(const TsouModel& model, double t) {
  check_t(t);
  const auto& law = model.law;
  const double a = law.alpha;
  std::vector<double> psi(law.dimension(), 0.0);
  if (a < 1) return psi;
  const double lt = model.lambda * t;
  const double el = checked_exp(lt, "transition psi");
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    auto f = [&](double u) { return law.tempering.q_difference(i, u, el) * std::pow(u, -a); };
    double val;
    const double hi = a == 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
    if (std::holds_alternative<HardTruncation>(law.tempering.variant())) {
      const double g = law.tempering.hard_gamma(i);
      const double lo = g / el, up = std::min(g, hi);
      val = up > lo ? quad::value_or_throw(quad::finite(f, lo, up, opt), "psi") : 0.0;
    } else {
      val = quad::value_or_throw(quad::half_line(f, opt, 1.0, 0.0, hi), "psi");
    }
    const auto& xi = law.sigma[i].direction;
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] += std::exp(-a * lt) * law.sigma[i].weight * xi[j] * val;
  }
  return psi;
}

TransitionParams transition_params(const TsouModel& model, double t) {
  check_t(t);
  const double a = model.alpha();
  const double lt = model.lambda * t;
  const KValue K = compute_K(model, t);
  if (K.infinite)
    throw InfiniteKError("transition: K is infinite (p <= alpha or infinite Rosinski measure); "
                         "the compound-Poisson decomposition is unavailable");
  TransitionParams p{t,
                     std::exp(-lt),
                     K,
                     K.value * std::exp(-a * lt),
                     transition_drift(model, t),
                     transition_psi(model, t),
                     model.law.sigma.scaled(-std::expm1(-a * lt))};
  return p;
}

cplx transition_log_cf(const TsouModel& model, std::span<const double> y, std::span<const double> z, double t,
                       LevyRoute route) {
  check_t(t);
  const auto& law = model.law;
  const std::size_t d = law.dimension();
  if (y.size() != d || z.size() != d) throw DomainError("transition CF: dimension mismatch");
  const double a = law.alpha;
  const double lt = model.lambda * t;
  const double el = checked_exp(lt, "transition CF");
  bool zero = true;
  for (double v : z) zero = zero && v == 0;
  if (zero) return 0.0;
  double lin = 0;
  const auto drift = transition_drift(model, t);
  for (std::size_t j = 0; j < d; ++j) lin += std::exp(-lt) * y[j] * z[j] + drift[j] * z[j];
  cplx c(0.0, lin);
  const double wl = -std::expm1(-a * lt), wd = std::exp(-a * lt);
  const bool stable = std::holds_alternative<ConstantOne>(law.tempering.variant());
  for (std::size_t i = 0; i < law.sigma.size(); ++i) {
    const double s = law.sigma[i].direction.dot(z);
    const double w = law.sigma[i].weight;
    c += w * wl * levy_integral(law, i, s, 0.0, route);
    if (!stable) c += w * wd * levy_integral(law, i, s, el, route);
  }
  return c;
}

cplx transition_cf(const TsouModel& model, std::span<const double> y, std::span<const double> z, double t,
                   LevyRoute route) {
  const cplx c = transition_log_cf(model, y, z, t, route);
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericError("transition CF: non-finite exponent");
  return std::exp(c);
}

cplx limit_cf(const TsouModel& model, std::span<const double> z, LevyRoute route) {
  return std::exp(ts_log_cf(model.law, z, route));
}

TransitionSampler::TransitionSampler(const TsouModel& model, double t, SamplerOptions options)
    : model_(model),
      params_(transition_params(model, t)),
      base_(make_base_spec(model.law.with_sigma(params_.sigma0), options.trunc_tolerance, options.tail_compensation)) {
  if (params_.K.value > 0) jumps_.emplace(JumpLaw::build(model_, t));
  offset_ = params_.d_alpha;
  for (std::size_t j = 0; j < offset_.size(); ++j) offset_[j] -= params_.psi[j];
}

State TransitionSampler::sample(std::span<const double> y, RngStream& rng, StepDiagnostics* diag) const {
  const std::size_t d = dimension();
  if (y.size() != d) throw DomainError("transition: state dimension mismatch");
  State out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = params_.decay * y[j] + offset_[j];
  SeriesDiagnostics sd;
  base_.add_sample(rng, out, diag ? &sd : nullptr);
  std::uint64_t n = 0, iters = 0;
  if (jumps_) {
    n = rng.poisson(params_.poisson_mean);
    const auto& dirs = jumps_->directions();
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto jd = jumps_->sample(rng);
      const auto& xi = dirs[jd.index].direction;
      for (std::size_t j = 0; j < d; ++j) out[j] += jd.radius * xi[j];
      iters += jd.iterations;
    }
  }
  if (diag) {
    diag->jumps = n;
    diag->iterations = iters;
    diag->trunc_bound = sd.truncation_bound;
  }
  return out;
}

State sample_increment(const TsouModel& model, std::span<const double> y, double t, RngStream& rng,
                       SamplerOptions options) {
  return TransitionSampler(model, t, options).sample(y, rng);
}

PathRecord simulate_path(const TransitionSampler& sampler, std::span<const double> y0, std::size_t n_steps,
                         RngStream& rng) {
  PathRecord rec;
  rec.seed = rng.seed();
  rec.stream = rng.stream_id();
  rec.times.reserve(n_steps + 1);
  rec.states.reserve(n_steps + 1);
  rec.steps.reserve(n_steps);
  const double t = sampler.params().t;
  rec.times.push_back(0.0);
  rec.states.emplace_back(y0.begin(), y0.end());
  for (std::size_t k = 0; k < n_steps; ++k) {
    StepDiagnostics diag;
    rec.states.push_back(sampler.sample(rec.states.back(), rng, &diag));
    rec.times.push_back(static_cast<double>(k + 1) * t);
    rec.steps.push_back(diag);
  }
  return rec;
}

PathRecord simulate_path(const TsouModel& model, std::span<const double> y0, std::size_t n_steps, double t,
                         RngStream& rng, SamplerOptions options) {
  return simulate_path(TransitionSampler(model, t, options), y0, n_steps, rng);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<PathRecord> simulate_paths(const TransitionSampler& sampler, std::span<const double> y0,
                                       std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                                       unsigned threads) {
  std::vector<PathRecord> out(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RngStream rng(seed, i);
    out[i] = simulate_path(sampler, y0, n_steps, rng);
  });
  return out;
}

}  // namespace tsou
