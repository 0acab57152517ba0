#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tsou {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double value = 0;      // the measured statistic
  double threshold = 0;  // pass iff value is on the right side of it
  std::string detail;
  double seconds = 0;
};

// Sample sizes and the thresholds tied to them. Thresholds that do not depend
// on the profile are constants in suite.cpp.
struct SuiteProfile {
  std::string name;
  std::uint64_t accept_trials;
  std::uint64_t cf_samples;
  double cf_threshold;
  std::uint64_t stationarity_paths;
  double stationarity_threshold;
  std::uint64_t base_samples;
  double base_threshold;
  std::uint64_t sampler_samples;
  double sampler_threshold;
  unsigned threads = 1;
  std::uint64_t seed = 20190923;

  static SuiteProfile quick();
  static SuiteProfile ci();
  static SuiteProfile full();
  static SuiteProfile by_name(const std::string& name);
};

CheckResult check_v1_reproduction();
CheckResult check_acceptance_count(const SuiteProfile& p);
CheckResult check_k_closed_form();
CheckResult check_gamma_identity_grid();
CheckResult check_fxi_normalization();
CheckResult check_envelope_domination();
CheckResult check_cf_crosscheck(const SuiteProfile& p);
CheckResult check_stationarity(const SuiteProfile& p);
CheckResult check_base_equivalence(const SuiteProfile& p);
CheckResult check_analytic_samplers(const SuiteProfile& p);
CheckResult check_determinism(const SuiteProfile& p);

// Runs every check in order; exceptions become failed results.
std::vector<CheckResult> run_suite(const SuiteProfile& p,
                                   const std::function<void(const CheckResult&)>& on_result = {});
std::string format_result(const CheckResult& r);

}  // namespace tsou
