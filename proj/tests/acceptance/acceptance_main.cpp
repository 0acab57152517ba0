// One line per acceptance criterion; exit status is nonzero if any fails.
#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "tsou/suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string profile = "ci";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--profile", profile, "quick, ci or full")->check(CLI::IsMember({"quick", "ci", "full"}));
  app.add_flag_callback("--full", [&] { profile = "full"; }, "same as --profile full");
  app.add_option("--threads", threads, "worker threads for the path checks");
  app.add_option("--seed", seed, "override the suite seed");
  CLI11_PARSE(app, argc, argv);

  auto p = tsou::SuiteProfile::by_name(profile);
  p.threads = threads;
  if (seed) p.seed = *seed;
  std::cout << "profile " << p.name << " seed " << p.seed << std::endl;
  int failed = 0;
  tsou::run_suite(p, [&](const tsou::CheckResult& r) {
    std::cout << tsou::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  });
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " failing" << std::endl;
  return failed ? 1 : 0;
}
