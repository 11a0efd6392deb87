// Acceptance battery: one line per criterion with the binding measurement,
// exit code = number of failed criteria. --only selects by id, name, or
// suite; default runs everything at seed 1.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "rmt/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> tokens;
  std::uint64_t seed = 1;
  int threads = 1;
  if (const char* env = std::getenv("RMT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) threads = v;
  }
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "%s needs a value\n", flag);
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--only") {
      std::string val = next("--only");
      size_t pos = 0;
      while (pos != std::string::npos) {
        size_t comma = val.find(',', pos);
        tokens.push_back(val.substr(pos, comma - pos));
        pos = comma == std::string::npos ? comma : comma + 1;
      }
    } else if (arg == "--seed") {
      seed = std::strtoull(next("--seed").c_str(), nullptr, 10);
    } else if (arg == "--threads") {
      threads = std::atoi(next("--threads").c_str());
    } else {
      std::fprintf(stderr,
                   "usage: acceptance [--only ID|NAME|SUITE[,..]] [--seed U64] "
                   "[--threads N]\n");
      return 2;
    }
  }
  if (tokens.empty()) tokens.push_back("all");

  std::vector<int> ids;
  try {
    ids = rmt::select_criteria(tokens);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  int failed = 0;
  for (int id : ids) {
    rmt::CriterionResult res = rmt::run_criterion(id, seed, threads);
    if (!res.passed) ++failed;
    const rmt::CheckLine* bind = res.binding();
    std::printf("%s criterion %02d %-22s [%s] %7.1f s  %s: measured %.6g vs %.6g\n",
                res.passed ? "PASS" : "FAIL", res.id, res.name.c_str(),
                res.suite.c_str(), res.seconds,
                bind ? bind->label.c_str() : "(no checks)",
                bind ? bind->measured : 0.0, bind ? bind->bound : 0.0);
    for (const auto& c : res.checks) {
      if (!c.pass)
        std::printf("     violated: %-52s measured %.6g vs %.6g\n",
                    c.label.c_str(), c.measured, c.bound);
    }
    std::fflush(stdout);
  }
  return std::min(failed, 125);
}
