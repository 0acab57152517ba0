#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsou/ou_transition.hpp"

namespace tsou {

// preset: "pt", "pt-multi", "tweedie", "hard-trunc"
struct ModelConfig {
  std::string preset = "pt";
  double alpha = 0.55;
  double ell = 1.0;  // pt, pt-multi
  double c = 1.0;    // pt, pt-multi
  std::vector<std::vector<double>> generators;  // pt-multi; empty means the default pair of planes
  double zeta = 1.0;    // tweedie
  double gamma = 1.0;   // hard-trunc
  double weight = 0.2;  // tweedie, hard-trunc: sigma weight per atom
  bool two_sided = false;  // tweedie: atoms at +1 and -1 instead of +1 only
};

// kind: "mll", "gga", "fxi"
struct DistConfig {
  std::string kind = "fxi";
  double alpha = 0.55;  // mll
  double p = 1.0;       // mll, gga
  double delta = 1.0;   // mll
  double beta = 0.45;   // gga
  double theta = 1.0;   // gga
};

struct ExperimentConfig {
  ModelConfig model;
  DistConfig dist;
  double lambda = 1.0;
  double t = 0.1;
  // Unset counts take the subcommand's default (the figure sizes for reproduce-paper).
  std::optional<std::uint64_t> n_steps;
  std::optional<std::uint64_t> n_paths;
  std::optional<std::uint64_t> n_samples;
  std::vector<double> y0;  // empty means the origin
  std::uint64_t seed = 1;
  double trunc_tolerance = 1e-8;
  bool tail_compensation = true;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::string experiment = "fig2";  // reproduce-paper
  std::string profile = "ci";       // validate: quick, ci, full
};

std::string config_to_json(const ExperimentConfig& cfg, int indent = -1);
// Unknown keys and out-of-domain values throw ConfigError.
ExperimentConfig config_from_json(const std::string& text);
// Overlays TSOU_<KEY> variables (e.g. TSOU_SEED, TSOU_N_PATHS); values are JSON
// or bare strings.
void apply_env_overrides(ExperimentConfig& cfg, char** envp);
void validate_config(const ExperimentConfig& cfg);

TsouModel build_model(const ModelConfig& m, double lambda);
std::vector<Direction> default_generators();

// Lossless decimal form used in all outputs.
std::string format_double(double x);
void write_header(std::ostream& os, const ExperimentConfig& cfg, const std::string& command);
// Columns path_id, step, time, x1..xd, N, iters, trunc_bound; rows sorted by path.
void write_paths_csv(std::ostream& os, std::span<const PathRecord> paths, std::uint64_t first_id = 0);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

// Runs a subcommand, writing <out_dir>/<name>.csv and <name>.json. Errors are
// mapped to exit codes and reported on `log`.
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace tsou
