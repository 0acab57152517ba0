#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tsou/base_increment.hpp"
#include "tsou/jump_law.hpp"
#include "tsou/levy_integrals.hpp"
#include "tsou/model.hpp"

namespace tsou {

using State = std::vector<double>;

struct TransitionParams {
  double t;
  double decay;  // e^{-lambda t}
  KValue K;
  double poisson_mean;  // K e^{-alpha lambda t}
  std::vector<double> d_alpha;
  std::vector<double> psi;
  SphericalMeasure sigma0;  // (1 - e^{-alpha lambda t}) sigma
};

// Throws InfiniteKError when K is infinite.
TransitionParams transition_params(const TsouModel& model, double t);

// Drift (1 - e^{-lambda t}) b, plus the alpha = 1 correction.
std::vector<double> transition_drift(const TsouModel& model, double t);
// Centering vector psi; zero for alpha < 1.
std::vector<double> transition_psi(const TsouModel& model, double t);

cplx transition_log_cf(const TsouModel& model, std::span<const double> y, std::span<const double> z, double t,
                       LevyRoute route = LevyRoute::Auto);
cplx transition_cf(const TsouModel& model, std::span<const double> y, std::span<const double> z, double t,
                   LevyRoute route = LevyRoute::Auto);
// CF of the limiting law TS(sigma, q, b).
cplx limit_cf(const TsouModel& model, std::span<const double> z, LevyRoute route = LevyRoute::Auto);

struct SamplerOptions {
  double trunc_tolerance = 1e-8;
  bool tail_compensation = true;
};

struct StepDiagnostics {
  std::uint64_t jumps = 0;       // N
  std::uint64_t iterations = 0;  // rejection proposals over all N jumps
  double trunc_bound = 0;
};

// Everything needed to draw increments over a fixed step t.
class TransitionSampler {
 public:
  TransitionSampler(const TsouModel& model, double t, SamplerOptions options = {});

  const TsouModel& model() const { return model_; }
  const TransitionParams& params() const { return params_; }
  const JumpLaw* jump_law() const { return jumps_ ? &*jumps_ : nullptr; }
  const SeriesThinningSampler& base() const { return base_; }
  std::size_t dimension() const { return model_.dimension(); }

  State sample(std::span<const double> y, RngStream& rng, StepDiagnostics* diag = nullptr) const;

 private:
  TsouModel model_;
  TransitionParams params_;
  SeriesThinningSampler base_;
  std::optional<JumpLaw> jumps_;
  std::vector<double> offset_;  // d_alpha - psi
};

State sample_increment(const TsouModel& model, std::span<const double> y, double t, RngStream& rng,
                       SamplerOptions options = {});

struct PathRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<StepDiagnostics> steps;  // steps[k] produced states[k+1]
};

PathRecord simulate_path(const TransitionSampler& sampler, std::span<const double> y0, std::size_t n_steps,
                         RngStream& rng);
PathRecord simulate_path(const TsouModel& model, std::span<const double> y0, std::size_t n_steps, double t,
                         RngStream& rng, SamplerOptions options = {});

// Path i uses RngStream(seed, i); the result does not depend on `threads`.
std::vector<PathRecord> simulate_paths(const TransitionSampler& sampler, std::span<const double> y0,
                                       std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                                       unsigned threads = 1);

// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace tsou
