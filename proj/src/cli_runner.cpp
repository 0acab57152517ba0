#include "tsou/cli_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "tsou/dist_basic.hpp"
#include "tsou/jump_law.hpp"
#include "tsou/models_pt.hpp"
#include "tsou/suite.hpp"
#include "tsou/validation.hpp"

namespace tsou {

using json = nlohmann::ordered_json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  take(j, key, v);
  out = v;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string("config: ") + where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

json to_json(const ExperimentConfig& c) {
  json m = {{"preset", c.model.preset}, {"alpha", c.model.alpha},   {"ell", c.model.ell},
            {"c", c.model.c},           {"generators", c.model.generators}, {"zeta", c.model.zeta},
            {"gamma", c.model.gamma},   {"weight", c.model.weight}, {"two_sided", c.model.two_sided}};
  json d = {{"kind", c.dist.kind}, {"alpha", c.dist.alpha}, {"p", c.dist.p},
            {"delta", c.dist.delta}, {"beta", c.dist.beta}, {"theta", c.dist.theta}};
  json j = {{"model", m}, {"dist", d}, {"lambda", c.lambda}, {"t", c.t}};
  if (c.n_steps) j["n_steps"] = *c.n_steps;
  if (c.n_paths) j["n_paths"] = *c.n_paths;
  if (c.n_samples) j["n_samples"] = *c.n_samples;
  j["y0"] = c.y0;
  j["seed"] = c.seed;
  j["trunc_tolerance"] = c.trunc_tolerance;
  j["tail_compensation"] = c.tail_compensation;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["experiment"] = c.experiment;
  j["profile"] = c.profile;
  return j;
}

ExperimentConfig from_json(const json& j) {
  reject_unknown(j,
                 {"model", "dist", "lambda", "t", "n_steps", "n_paths", "n_samples", "y0", "seed", "trunc_tolerance",
                  "tail_compensation", "out_dir", "threads", "experiment", "profile"},
                 "config");
  ExperimentConfig c;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"preset", "alpha", "ell", "c", "generators", "zeta", "gamma", "weight", "two_sided"}, "model");
    take(m, "preset", c.model.preset);
    take(m, "alpha", c.model.alpha);
    take(m, "ell", c.model.ell);
    take(m, "c", c.model.c);
    take(m, "generators", c.model.generators);
    take(m, "zeta", c.model.zeta);
    take(m, "gamma", c.model.gamma);
    take(m, "weight", c.model.weight);
    take(m, "two_sided", c.model.two_sided);
  }
  if (j.contains("dist")) {
    const auto& d = j.at("dist");
    reject_unknown(d, {"kind", "alpha", "p", "delta", "beta", "theta"}, "dist");
    take(d, "kind", c.dist.kind);
    take(d, "alpha", c.dist.alpha);
    take(d, "p", c.dist.p);
    take(d, "delta", c.dist.delta);
    take(d, "beta", c.dist.beta);
    take(d, "theta", c.dist.theta);
  }
  take(j, "lambda", c.lambda);
  take(j, "t", c.t);
  take(j, "n_steps", c.n_steps);
  take(j, "n_paths", c.n_paths);
  take(j, "n_samples", c.n_samples);
  take(j, "y0", c.y0);
  take(j, "seed", c.seed);
  take(j, "trunc_tolerance", c.trunc_tolerance);
  take(j, "tail_compensation", c.tail_compensation);
  take(j, "out_dir", c.out_dir);
  take(j, "threads", c.threads);
  take(j, "experiment", c.experiment);
  take(j, "profile", c.profile);
  validate_config(c);
  return c;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

std::vector<double> origin_or(const ExperimentConfig& cfg, std::size_t d) {
  if (cfg.y0.empty()) return std::vector<double>(d, 0.0);
  if (cfg.y0.size() != d)
    throw ConfigError("config: y0 has " + std::to_string(cfg.y0.size()) + " components, model dimension is " +
                      std::to_string(d));
  return cfg.y0;
}

struct Outputs {
  std::filesystem::path csv;
  std::filesystem::path metrics;
};

Outputs output_paths(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return {dir / (name + ".csv"), dir / (name + ".json")};
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file " + p.string());
  return os;
}

void write_metrics(const std::filesystem::path& p, const ExperimentConfig& cfg, const std::string& command,
                   const json& metrics, double seconds) {
  json j = {{"command", command}, {"seed", cfg.seed}, {"config", to_json(cfg)}, {"metrics", metrics},
            {"seconds", seconds}};
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- commands

json cmd_sample_dist(const ExperimentConfig& cfg, const Outputs& out) {
  const std::uint64_t n = cfg.n_samples.value_or(100'000);
  auto os = open_out(out.csv);
  write_header(os, cfg, "sample-dist");
  RngStream rng(cfg.seed, 0);
  json m = {{"kind", cfg.dist.kind}, {"n", n}};
  if (cfg.dist.kind == "mll" || cfg.dist.kind == "gga") {
    os << "sample_id,value\n";
    std::vector<double> xs(n);
    if (cfg.dist.kind == "mll") {
      const MllParams p(cfg.dist.alpha, cfg.dist.p, cfg.dist.delta);
      for (auto& x : xs) x = mll_sample(p, rng);
      if (n >= 10) m["ks"] = ks_statistic(xs, [&](double x) { return mll_cdf(x, p); });
    } else {
      const GgaParams p(cfg.dist.beta, cfg.dist.p, cfg.dist.theta);
      for (auto& x : xs) x = gga_sample(p, rng);
      if (n >= 10) m["ks"] = ks_statistic(xs, [&](double x) { return gga_cdf(x, p); });
    }
    for (std::uint64_t i = 0; i < n; ++i) os << i << ',' << format_double(xs[i]) << '\n';
    return m;
  }
  // draws from H: a direction from sigma_1 and a radius from f_xi
  const TsouModel model = build_model(cfg.model, cfg.lambda);
  const JumpLaw law = JumpLaw::build(model, cfg.t);
  os << "sample_id,direction,radius,iters\n";
  std::uint64_t iters = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto d = law.sample(rng);
    iters += d.iterations;
    os << i << ',' << d.index << ',' << format_double(d.radius) << ',' << d.iterations << '\n';
  }
  json dirs = json::array();
  for (const auto& d : law.directions()) {
    json e = {{"atom", d.atom}, {"probability", d.probability}, {"kappa", d.kappa}, {"method", to_string(d.method)}};
    if (d.env1) e["V1"] = d.env1->V;
    if (d.env2) e["V2"] = d.env2->V;
    dirs.push_back(e);
  }
  m["directions"] = dirs;
  m["K"] = compute_K(model, cfg.t).value;
  m["mean_iterations"] = n ? static_cast<double>(iters) / static_cast<double>(n) : 0.0;
  m["acceptance_rate"] = iters ? static_cast<double>(n) / static_cast<double>(iters) : 0.0;
  return m;
}

json sampler_metrics(const TransitionSampler& s) {
  const auto& p = s.params();
  json m = {{"K", p.K.value}, {"poisson_mean", p.poisson_mean}, {"decay", p.decay},
            {"trunc_eps", s.base().spec().trunc_eps}, {"trunc_bound", error_measure(s.base().spec())}};
  if (const auto* jl = s.jump_law()) {
    json v = json::array();
    for (const auto& d : jl->directions()) v.push_back(d.env1 ? d.env1->V : (d.env2 ? d.env2->V : 0.0));
    m["envelope_V"] = v;
  }
  return m;
}

json cmd_sample_increment(const ExperimentConfig& cfg, const Outputs& out) {
  const std::uint64_t n = cfg.n_samples.value_or(100'000);
  const TsouModel model = build_model(cfg.model, cfg.lambda);
  const TransitionSampler sampler(model, cfg.t, {cfg.trunc_tolerance, cfg.tail_compensation});
  const auto y = origin_or(cfg, model.dimension());
  std::vector<State> xs(n);
  std::vector<StepDiagnostics> diags(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    xs[i] = sampler.sample(y, rng, &diags[i]);
  });
  auto os = open_out(out.csv);
  write_header(os, cfg, "sample-increment");
  os << "sample_id";
  for (std::size_t j = 0; j < model.dimension(); ++j) os << ",x" << j + 1;
  os << ",N,iters,trunc_bound\n";
  double jumps = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    os << i;
    for (double v : xs[i]) os << ',' << format_double(v);
    os << ',' << diags[i].jumps << ',' << diags[i].iterations << ',' << format_double(diags[i].trunc_bound) << '\n';
    jumps += static_cast<double>(diags[i].jumps);
  }
  json m = sampler_metrics(sampler);
  m["n"] = n;
  m["mean_jumps"] = n ? jumps / static_cast<double>(n) : 0.0;
  return m;
}

json path_metrics(const std::vector<PathRecord>& paths) {
  std::uint64_t jumps = 0, iters = 0, steps = 0;
  for (const auto& p : paths)
    for (const auto& d : p.steps) {
      jumps += d.jumps;
      iters += d.iterations;
      ++steps;
    }
  return {{"paths", paths.size()},
          {"steps", steps},
          {"jumps", jumps},
          {"rejection_iterations", iters},
          {"mean_iterations_per_jump", jumps ? static_cast<double>(iters) / static_cast<double>(jumps) : 0.0}};
}

json cmd_simulate_paths(const ExperimentConfig& cfg, const Outputs& out) {
  const TsouModel model = build_model(cfg.model, cfg.lambda);
  const TransitionSampler sampler(model, cfg.t, {cfg.trunc_tolerance, cfg.tail_compensation});
  const auto y0 = origin_or(cfg, model.dimension());
  const auto paths =
      simulate_paths(sampler, y0, cfg.n_steps.value_or(1000), cfg.n_paths.value_or(1), cfg.seed, cfg.threads);
  auto os = open_out(out.csv);
  write_header(os, cfg, "simulate-paths");
  write_paths_csv(os, paths);
  json m = sampler_metrics(sampler);
  m.update(path_metrics(paths));
  return m;
}

json cmd_validate(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log, bool& all_pass) {
  auto profile = SuiteProfile::by_name(cfg.profile);
  profile.threads = cfg.threads;
  profile.seed = cfg.seed;
  auto os = open_out(out.csv);
  write_header(os, cfg, "validate");
  os << "id,name,pass,value,threshold,seconds,detail\n";
  json m = json::array();
  all_pass = true;
  run_suite(profile, [&](const CheckResult& r) {
    log << format_result(r) << std::endl;
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    os << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << ',' << format_double(r.value) << ','
       << format_double(r.threshold) << ',' << format_double(r.seconds) << ',' << detail << '\n';
    m.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"threshold", r.threshold},
                 {"detail", r.detail}});
    all_pass = all_pass && r.pass;
  });
  return {{"profile", profile.name}, {"checks", m}, {"all_pass", all_pass}};
}

// ---------------------------------------------------------- figure recipes

constexpr std::uint64_t kFigureProposals = 10'000'000;

json fig1(const ExperimentConfig& cfg, const Outputs& out) {
  const PtParams pt(0.55, 1.0, 1.0);
  const MllParams mll(0.55, 1.0, 1.0);
  auto os = open_out(out.csv);
  write_header(os, cfg, "reproduce-paper fig1");
  os << "u,f_xi,mll_pdf\n";
  for (double u : log_grid(1e-4, 1e2, 400))
    os << format_double(u) << ',' << format_double(pt_f_xi_pdf(pt, 1.0, 0.1, u)) << ','
       << format_double(mll_pdf(u, mll)) << '\n';
  return {{"V1", pt_v1(pt, 1.0, 0.1)}};
}

json fig2(const ExperimentConfig& cfg, const Outputs& out, bool write_samples) {
  const PtParams pt(0.55, 1.0, 1.0);
  const double lambda = 1.0, t = 0.1;
  const JumpLaw law = pt_jumplaw(pt, lambda, t);
  const std::uint64_t n = cfg.n_samples.value_or(kFigureProposals);
  RngStream rng(cfg.seed, 0);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(static_cast<double>(n) / 12));
  for (std::uint64_t i = 0; i < n; ++i)
    if (auto u = law.algorithm1_trial(0, rng)) xs.push_back(rng.uniform() < 0.5 ? -*u : *u);
  const double V1 = law.directions()[0].env1->V;
  json m = {{"V1", V1},
            {"proposals", n},
            {"accepted", xs.size()},
            {"expected_accept", static_cast<double>(n) / V1},
            {"acceptance_rate", static_cast<double>(xs.size()) / static_cast<double>(n)}};
  if (!write_samples) return m;
  {
    auto os = open_out(out.csv);
    write_header(os, cfg, "reproduce-paper fig2");
    os << "sample_id,value\n";
    for (std::size_t i = 0; i < xs.size(); ++i) os << i << ',' << format_double(xs[i]) << '\n';
  }
  if (xs.size() >= 2) {
    // density of xi W is f_xi(|x|)/2
    const auto grid = linear_grid(-3, 3, 601);
    const double bw = silverman_bandwidth(xs);
    const auto est = kde(xs, grid, bw);
    auto os = open_out(out.csv.parent_path() / "fig2_density.csv");
    write_header(os, cfg, "reproduce-paper fig2");
    os << "x,kde,true_pdf\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      os << format_double(grid[i]) << ',' << format_double(est[i]) << ','
         << format_double(0.5 * pt_f_xi_pdf(pt, lambda, t, std::fabs(grid[i]))) << '\n';
    m["bandwidth"] = bw;
  }
  return m;
}

json fig3(const ExperimentConfig& cfg, const Outputs& out) {
  const std::pair<double, double> cases[] = {{0.55, 1}, {0.55, 10}, {0.75, 1}, {0.75, 10}};
  auto os = open_out(out.csv);
  write_header(os, cfg, "reproduce-paper fig3");
  json m = json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const PtParams pt(cases[k].first, cases[k].second, 1.0);
    os << "# path_id " << k << ": alpha=" << pt.alpha << " ell=" << pt.ell << '\n';
  }
  std::vector<PathRecord> all;
  for (std::size_t k = 0; k < 4; ++k) {
    const PtParams pt(cases[k].first, cases[k].second, 1.0);
    const TransitionSampler s(pt_model(pt, cfg.lambda), cfg.t, {cfg.trunc_tolerance, cfg.tail_compensation});
    RngStream rng(cfg.seed, k);
    all.push_back(simulate_path(s, std::vector<double>{0.0}, cfg.n_steps.value_or(1000), rng));
    m.push_back({{"alpha", pt.alpha}, {"ell", pt.ell}, {"K", s.params().K.value}});
  }
  write_paths_csv(os, all);
  return {{"cases", m}};
}

json fig4(const ExperimentConfig& cfg, const Outputs& out) {
  const std::pair<double, double> cases[] = {{0.55, 1}, {0.75, 1}};
  const std::uint64_t n_paths = cfg.n_paths.value_or(3000);
  const std::uint64_t n_steps = cfg.n_steps.value_or(1000);
  auto os = open_out(out.csv);
  write_header(os, cfg, "reproduce-paper fig4");
  os << "case_id,path_id,terminal\n";
  const auto grid = linear_grid(-5, 5, 401);
  std::vector<std::vector<double>> cols;
  json m = json::array();
  for (std::size_t k = 0; k < 2; ++k) {
    const PtParams pt(cases[k].first, cases[k].second, 1.0);
    const TransitionSampler s(pt_model(pt, cfg.lambda), cfg.t, {cfg.trunc_tolerance, cfg.tail_compensation});
    std::vector<double> term(n_paths);
    parallel_for(n_paths, cfg.threads, [&](std::size_t i) {
      RngStream rng(cfg.seed + k, i);
      std::vector<double> y{0.0};
      for (std::uint64_t j = 0; j < n_steps; ++j) y = s.sample(y, rng);
      term[i] = y[0];
    });
    for (std::uint64_t i = 0; i < n_paths; ++i) os << k << ',' << i << ',' << format_double(term[i]) << '\n';
    double xm = 5;
    for (double x : term) xm = std::max(xm, std::fabs(x));
    InversionOptions opt;
    opt.x_max = std::ceil(xm);
    const PtReferenceDensity ref(pt, opt);
    json c = {{"alpha", pt.alpha}, {"ell", pt.ell}, {"paths", n_paths}};
    if (n_paths >= 10) c["ks"] = ks_statistic(term, [&](double x) { return ref.cdf(x); });
    if (n_paths >= 2) cols.push_back(kde(term, grid, silverman_bandwidth(term)));
    cols.push_back(ref.inverter().density(grid));
    m.push_back(c);
  }
  auto ds = open_out(out.csv.parent_path() / "fig4_density.csv");
  write_header(ds, cfg, "reproduce-paper fig4");
  ds << "x";
  for (std::size_t k = 0; k < 2; ++k) {
    if (n_paths >= 2) ds << ",kde_" << k;
    ds << ",true_" << k;
  }
  ds << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ds << format_double(grid[i]);
    for (const auto& c : cols) ds << ',' << format_double(c[i]);
    ds << '\n';
  }
  return {{"cases", m}};
}

json fig5(const ExperimentConfig& cfg, const Outputs& out) {
  const double r2 = std::sqrt(2.0) / 2, r3 = std::sqrt(3.0) / 2, r13 = std::sqrt(13.0);
  const std::vector<std::vector<std::vector<double>>> sets = {
      {{r2, r2}, {r3, 0.5}, {-r2, r2}},
      {{r2, -r2}, {r3, -0.5}, {2 / r13, -3 / r13}},
  };
  auto os = open_out(out.csv);
  write_header(os, cfg, "reproduce-paper fig5");
  std::vector<PathRecord> all;
  json m = json::array();
  const PtParams pt(0.55, 1.0, 1.0);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    std::vector<Direction> gens;
    for (const auto& g : sets[k]) gens.push_back(Direction::normalized(g));
    const PtMultivariate pm(std::move(gens), pt);
    const TransitionSampler s(pt_multivariate_model(pm, cfg.lambda), cfg.t,
                              {cfg.trunc_tolerance, cfg.tail_compensation});
    RngStream rng(cfg.seed, k);
    all.push_back(simulate_path(s, std::vector<double>{0.0, 0.0}, cfg.n_steps.value_or(1000), rng));
    os << "# path_id " << k << ": generator set " << k << '\n';
    m.push_back({{"set", k}, {"K", s.params().K.value}});
  }
  write_paths_csv(os, all);
  return {{"cases", m}};
}

json cmd_reproduce(const ExperimentConfig& cfg, const Outputs& out) {
  const auto& e = cfg.experiment;
  if (e == "fig1") return fig1(cfg, out);
  if (e == "fig2") return fig2(cfg, out, true);
  if (e == "counts") {
    json m = fig2(cfg, out, false);
    auto os = open_out(out.csv);
    write_header(os, cfg, "reproduce-paper counts");
    os << "proposals,accepted,expected_accept,V1\n"
       << m["proposals"].get<std::uint64_t>() << ',' << m["accepted"].get<std::uint64_t>() << ','
       << format_double(m["expected_accept"].get<double>()) << ',' << format_double(m["V1"].get<double>()) << '\n';
    return m;
  }
  if (e == "fig3") return fig3(cfg, out);
  if (e == "fig4") return fig4(cfg, out);
  if (e == "fig5") return fig5(cfg, out);
  throw ConfigError("unknown experiment '" + e + "' (expected fig1..fig5 or counts)");
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg, int indent) { return to_json(cfg).dump(indent); }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

void apply_env_overrides(ExperimentConfig& cfg, char** envp) {
  if (!envp) return;
  json j = to_json(cfg);
  bool changed = false;
  for (char** e = envp; *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind("TSOU_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(5, eq - 5);
    for (char& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const std::string value = entry.substr(eq + 1);
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    j[key] = v;  // unknown keys are rejected by from_json
    changed = true;
  }
  if (changed) cfg = from_json(j);
}

void validate_config(const ExperimentConfig& c) {
  const auto& m = c.model;
  require(m.preset == "pt" || m.preset == "pt-multi" || m.preset == "tweedie" || m.preset == "hard-trunc",
          "model.preset must be pt, pt-multi, tweedie or hard-trunc");
  require(m.alpha > 0 && m.alpha < 1, "model.alpha must lie in (0,1) for simulation");
  require(m.ell > 0 && std::isfinite(m.ell), "model.ell must be positive");
  require(m.c > 0 && std::isfinite(m.c), "model.c must be positive");
  require(m.zeta > 0 && std::isfinite(m.zeta), "model.zeta must be positive");
  require(m.gamma > 0 && std::isfinite(m.gamma), "model.gamma must be positive");
  require(m.weight > 0 && std::isfinite(m.weight), "model.weight must be positive");
  for (const auto& g : m.generators) require(g.size() >= 2, "model.generators must have dimension >= 2");
  const auto& d = c.dist;
  require(d.kind == "mll" || d.kind == "gga" || d.kind == "fxi", "dist.kind must be mll, gga or fxi");
  require(d.alpha > 0 && d.p > 0 && d.delta > 0 && d.beta > 0 && d.theta > 0, "dist parameters must be positive");
  require(c.lambda > 0 && std::isfinite(c.lambda), "lambda must be positive");
  require(c.t > 0 && std::isfinite(c.t), "t must be positive");
  require(!c.n_steps || *c.n_steps > 0, "n_steps must be positive");
  require(!c.n_paths || *c.n_paths > 0, "n_paths must be positive");
  require(!c.n_samples || *c.n_samples > 0, "n_samples must be positive");
  for (double v : c.y0) require(std::isfinite(v), "y0 must be finite");
  require(c.trunc_tolerance > 0 && std::isfinite(c.trunc_tolerance), "trunc_tolerance must be positive");
  require(c.threads >= 1 && c.threads <= 1024, "threads must lie in [1, 1024]");
  require(!c.out_dir.empty(), "out_dir must not be empty");
  require(c.profile == "quick" || c.profile == "ci" || c.profile == "full", "profile must be quick, ci or full");
}

std::vector<Direction> default_generators() {
  const double r2 = std::sqrt(2.0) / 2, r3 = std::sqrt(3.0) / 2;
  return {Direction::normalized({r2, r2}), Direction::normalized({r3, 0.5}), Direction::normalized({-r2, r2})};
}

TsouModel build_model(const ModelConfig& m, double lambda) {
  if (m.preset == "pt") return pt_model(PtParams(m.alpha, m.ell, m.c), lambda);
  if (m.preset == "pt-multi") {
    std::vector<Direction> gens;
    if (m.generators.empty()) {
      gens = default_generators();
    } else {
      for (const auto& g : m.generators) gens.push_back(Direction::normalized(g));
    }
    return pt_multivariate_model(PtMultivariate(std::move(gens), PtParams(m.alpha, m.ell, m.c)), lambda);
  }
  if (m.preset == "tweedie") {
    std::vector<SphericalAtom> atoms{{Direction({1.0}), m.weight}};
    if (m.two_sided) atoms.push_back({Direction({-1.0}), m.weight});
    std::vector<double> zeta(atoms.size(), m.zeta);
    return TsouModel(TsLaw(m.alpha, SphericalMeasure(std::move(atoms)), Classical{zeta, 1.0}), lambda);
  }
  if (m.preset == "hard-trunc") {
    SphericalMeasure sigma({{Direction({-1.0}), m.weight}, {Direction({1.0}), m.weight}});
    return TsouModel(TsLaw(m.alpha, std::move(sigma), HardTruncation{{m.gamma}}), lambda);
  }
  throw ConfigError("unknown model preset '" + m.preset + "'");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_header(std::ostream& os, const ExperimentConfig& cfg, const std::string& command) {
  os << "# tsou " << command << '\n';
  os << "# seed: " << cfg.seed << '\n';
  os << "# config: " << config_to_json(cfg) << '\n';
}

void write_paths_csv(std::ostream& os, std::span<const PathRecord> paths, std::uint64_t first_id) {
  const std::size_t d = paths.empty() || paths.front().states.empty() ? 0 : paths.front().states.front().size();
  os << "path_id,step,time";
  for (std::size_t j = 0; j < d; ++j) os << ",x" << j + 1;
  os << ",N,iters,trunc_bound\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& rec = paths[p];
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
      os << first_id + p << ',' << k << ',' << format_double(rec.times[k]);
      for (double v : rec.states[k]) os << ',' << format_double(v);
      // row k holds the step that produced state k; the initial row has none
      if (k == 0) {
        os << ",0,0,0\n";
      } else {
        const auto& s = rec.steps[k - 1];
        os << ',' << s.jumps << ',' << s.iterations << ',' << format_double(s.trunc_bound) << '\n';
      }
    }
  }
}

int run(const std::string& sub, const ExperimentConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    validate_config(cfg);
    std::string name = sub;
    if (sub == "reproduce-paper") name = cfg.experiment;
    if (sub != "sample-dist" && sub != "sample-increment" && sub != "simulate-paths" && sub != "validate" &&
        sub != "reproduce-paper")
      throw ConfigError("unknown subcommand '" + sub + "'");
    const Outputs out = output_paths(cfg, name);
    json m;
    bool ok = true;
    if (sub == "sample-dist") m = cmd_sample_dist(cfg, out);
    if (sub == "sample-increment") m = cmd_sample_increment(cfg, out);
    if (sub == "simulate-paths") m = cmd_simulate_paths(cfg, out);
    if (sub == "validate") m = cmd_validate(cfg, out, log, ok);
    if (sub == "reproduce-paper") m = cmd_reproduce(cfg, out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_metrics(out.metrics, cfg, sub, m, secs);
    log << "wrote " << out.csv.string() << " and " << out.metrics.string() << '\n';
    if (!ok) {
      log << "validation failed\n";
      return kExitNumeric;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    log << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace tsou
