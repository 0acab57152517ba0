#pragma once

#include <cstdint>
#include <vector>

#include "tsou/model.hpp"
#include "tsou/rng.hpp"

namespace tsou {

// TS_{alpha,d}(sigma0, q, 0) sampled by an inverse-Levy series with thinning,
// truncated at jump size trunc_eps. `law.shift` is ignored.
struct BaseIncrementSpec {
  TsLaw law;
  double trunc_eps;
  bool tail_compensation = true;
  // Configured bound on error_measure(); <= 0 disables the check.
  double tolerance = 0;
};

// Sum over atoms of w eps^{1-alpha} / (1-alpha): bound on the mean norm of the
// discarded small-jump sum.
double truncation_error_bound(const BaseIncrementSpec& spec);
// sqrt(sum w eps^{2-alpha} / (2-alpha)): bound on the standard deviation of
// the discarded sum once its mean has been added back.
double compensated_residual_sd(const BaseIncrementSpec& spec);
// The bound that applies to the spec: residual sd with compensation, mean bound without.
double error_measure(const BaseIncrementSpec& spec);

// Largest eps meeting `tolerance` for the chosen compensation mode.
BaseIncrementSpec make_base_spec(TsLaw law, double tolerance, bool tail_compensation = true);

struct SeriesDiagnostics {
  std::uint64_t kept = 0;
  std::uint64_t thinned = 0;
  std::uint64_t kept_above = 0;     // jumps larger than the diagnostic cutoff
  std::uint64_t thinned_above = 0;
  double truncation_bound = 0;
};

class SeriesThinningSampler {
 public:
  explicit SeriesThinningSampler(BaseIncrementSpec spec, double diagnostic_cutoff = 0);

  const BaseIncrementSpec& spec() const { return spec_; }
  std::size_t dimension() const { return spec_.law.dimension(); }
  // Adds the draw to `out` (size = dimension).
  void add_sample(RngStream& rng, std::span<double> out, SeriesDiagnostics* diag = nullptr) const;
  std::vector<double> sample(RngStream& rng, SeriesDiagnostics* diag = nullptr) const;
  // Deterministic drift added per atom when compensation is on.
  const std::vector<double>& compensation() const { return comp_; }

 private:
  struct Atom {
    double weight;
    double gamma_max;  // arrival time at which the jump size reaches eps
    double squeeze_M;  // q(u) >= 1 - M u^p; 0 when unavailable
    double hard_gamma; // > 0 for hard truncation
    bool always_keep;
  };

  BaseIncrementSpec spec_;
  double cutoff_;
  double p_ = 1;
  std::vector<Atom> atoms_;
  std::vector<double> comp_;
};

std::vector<double> series_thinning_sample(const BaseIncrementSpec& spec, RngStream& rng);

// Classical one-sided tempered stable with Levy density weight e^{-zeta u} u^{-1-alpha},
// by rejection from the positive stable law.
double esscher_tweedie_sample(double alpha, double zeta, double weight, RngStream& rng,
                              std::uint64_t* iterations = nullptr);

}  // namespace tsou
