#include "semibloch/errors.hpp"
#include "semibloch/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

using namespace semibloch;

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks, one line per criterion"};
  std::vector<int> only;
  int threads = 1;
  bool verbose = false;
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "print context lines");
  CLI11_PARSE(app, argc, argv);
  if (only.empty()) only = criterion_ids();

  int failed = 0;
  for (int id : only) {
    try {
      CriterionResult r = run_criterion(id, threads);
      std::printf("%s  (%.1f s)\n", r.line().c_str(), r.seconds);
      if (verbose || !r.pass())
        for (const auto& s : r.info) std::printf("      %s\n", s.c_str());
      if (!r.pass()) ++failed;
    } catch (const std::exception& e) {
      std::printf("FAIL  c%d %s: error: %s\n", id, criterion_title(id).c_str(), e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  return failed ? 2 : 0;
}
