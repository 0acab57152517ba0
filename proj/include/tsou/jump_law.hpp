#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tsou/dist_basic.hpp"
#include "tsou/model.hpp"

namespace tsou {

enum class RadialMethod { InverseCdf, Algorithm1, Algorithm2 };
const char* to_string(RadialMethod m);

// Modified log-Laplace envelope; `scale` is max{1, M (e^{p lambda t} - 1)}.
struct Envelope1 {
  double V;
  MllParams proposal;
  double scale;
};

// Generalized gamma envelope, available when Q is bounded away from zero;
// `scale` is (e^{p lambda t} - 1) M.
struct Envelope2 {
  double V;
  GgaParams proposal;
  double zeta;
  double scale;
};

struct DirectionLaw {
  std::size_t atom;
  Direction direction;
  double probability;  // sigma_1 weight
  double kappa;        // radial normaliser
  RadialMethod method;
  std::optional<Envelope1> env1;
  std::optional<Envelope2> env2;
};

struct RadialDraw {
  double value;
  std::uint64_t iterations;
};

struct JumpDraw {
  std::size_t index;  // into directions()
  double radius;
  std::uint64_t iterations;
};

inline constexpr std::uint64_t kMaxRejectionIterations = 1'000'000;

// The jump distribution H(dxi, du) = f_xi(u) du sigma_1(dxi) of the
// compound-Poisson part of a transition over a step of length t.
class JumpLaw {
 public:
  JumpLaw(TsouModel model, double t, std::vector<DirectionLaw> directions);
  static JumpLaw build(const TsouModel& model, double t);

  const TsouModel& model() const { return model_; }
  double t() const { return t_; }
  const std::vector<DirectionLaw>& directions() const { return dirs_; }
  std::size_t index_of(const Direction& xi) const;

  // q(u) - q(u e^{lambda t}); f_xi(u) = kappa * numerator(u) * u^{-1-alpha}
  double numerator(std::size_t k, double u) const;
  double pdf(std::size_t k, double u) const;
  double cdf(std::size_t k, double u) const;  // quadrature, for validation
  double phi1(std::size_t k, double u) const;
  double phi2(std::size_t k, double u) const;

  // One proposal of the MLL rejection step; nullopt when rejected.
  std::optional<double> algorithm1_trial(std::size_t k, RngStream& rng) const;
  RadialDraw algorithm1(std::size_t k, RngStream& rng) const;
  RadialDraw algorithm2(std::size_t k, RngStream& rng) const;
  RadialDraw sample_radial(std::size_t k, RngStream& rng) const;
  JumpDraw sample(RngStream& rng) const;

 private:
  double checked_phi(double phi) const;

  TsouModel model_;
  double t_;
  double p_ = 1;
  double exp_lt_;   // e^{lambda t}
  double growth_;   // e^{alpha lambda t} - 1
  std::vector<DirectionLaw> dirs_;
  std::vector<double> cumulative_;
};

double kappa_xi(const TsouModel& model, double t, const Direction& xi);
std::vector<std::pair<Direction, double>> sigma1_build(const TsouModel& model, double t);
double f_xi_pdf(const TsouModel& model, double t, const Direction& xi, double u);
Envelope1 envelope_v1(const TsouModel& model, double t, const Direction& xi);
std::optional<Envelope2> envelope_v2(const TsouModel& model, double t, const Direction& xi);

RadialDraw algorithm1_sample(const JumpLaw& law, std::size_t k, RngStream& rng);
RadialDraw algorithm2_sample(const JumpLaw& law, std::size_t k, RngStream& rng);
JumpDraw sample_H(const JumpLaw& law, RngStream& rng);

// Inverse-CDF sampler for the radial law under q = 1[u <= gamma].
double hardtrunc_quantile(double y, double gamma, double alpha, double lambda, double t);
double hardtrunc_cdf(double x, double gamma, double alpha, double lambda, double t);
double hardtrunc_sample(double gamma, double alpha, double lambda, double t, RngStream& rng);

}  // namespace tsou
