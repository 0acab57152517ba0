#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tsou/cli_runner.hpp"

extern char** environ;

namespace {

struct Flags {
  std::string config_file;
  std::optional<std::uint64_t> seed, n_steps, n_paths, n_samples;
  std::optional<std::string> out, experiment, profile;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_option("--n-steps", f.n_steps, "steps per path");
  sub->add_option("--n-paths", f.n_paths, "number of paths");
  sub->add_option("--n-samples", f.n_samples, "number of draws (proposals for fig2/counts)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation of tempered stable OU processes"};
  app.require_subcommand(1);
  Flags f;
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  const char* verbs[][2] = {
      {"sample-dist", "draw from MLL, GGa or the radial jump density"},
      {"sample-increment", "draw transition increments from a fixed state"},
      {"simulate-paths", "simulate OU paths on a uniform grid"},
      {"validate", "run the oracle suite"},
      {"reproduce-paper", "regenerate the data behind the published figures"},
  };
  for (auto& v : verbs) {
    auto* sub = app.add_subcommand(v[0], v[1]);
    add_common(sub, f);
    if (std::string(v[0]) == "reproduce-paper")
      sub->add_option("--experiment", f.experiment, "fig1, fig2, fig3, fig4, fig5 or counts");
    if (std::string(v[0]) == "validate") sub->add_option("--profile", f.profile, "quick, ci or full");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tsou::kExitConfig;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  tsou::ExperimentConfig cfg;
  try {
    if (!f.config_file.empty()) {
      std::ifstream in(f.config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = tsou::config_from_json(ss.str());
    }
    tsou::apply_env_overrides(cfg, environ);
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_dir = *f.out;
    if (f.threads) cfg.threads = *f.threads;
    if (f.n_steps) cfg.n_steps = f.n_steps;
    if (f.n_paths) cfg.n_paths = f.n_paths;
    if (f.n_samples) cfg.n_samples = f.n_samples;
    if (f.experiment) cfg.experiment = *f.experiment;
    if (f.profile) cfg.profile = *f.profile;
    tsou::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tsou::kExitConfig;
  }
  if (print_config) {
    std::cout << tsou::config_to_json(cfg, 2) << '\n';
    return 0;
  }
  return tsou::run(verb, cfg, std::cerr);
}
