#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmt/runner.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("RMT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* copt = cmd->add_option("--config", f.config_path,
                               "experiment config JSON file");
  if (config_required) copt->required();
  cmd->add_option("--seed", f.seed, "RNG seed (overrides config)")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
  cmd->add_option("--threads", f.threads,
                  "worker threads (overrides config and RMT_THREADS)");
}

rmt::ExperimentConfig effective_config(const CommonFlags& f) {
  rmt::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = rmt::parse_config(read_file(f.config_path));
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.threads >= 1)
    cfg.threads = f.threads;
  else if (cfg.threads <= 1)
    cfg.threads = default_threads();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random matrix ensemble laboratory"};
  app.require_subcommand(1);

  CommonFlags pf, sf, kf, vf;
  std::vector<std::string> suites;

  CLI::App* cparams =
      app.add_subcommand("params", "report derived constants and scalings");
  add_common(cparams, pf, true);
  CLI::App* csample =
      app.add_subcommand("sample", "draw spectra and write records");
  add_common(csample, sf, true);
  CLI::App* ckernel =
      app.add_subcommand("kernel", "tabulate a kernel regime on a grid");
  add_common(ckernel, kf, true);
  CLI::App* cverify =
      app.add_subcommand("verify", "run verification criterion suites");
  add_common(cverify, vf, false);
  cverify->add_option("--suite", suites,
                      "suite or criterion selection (overrides config)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (cparams->parsed()) return rmt::cmd_params(effective_config(pf));
    if (csample->parsed()) return rmt::cmd_sample(effective_config(sf));
    if (ckernel->parsed()) return rmt::cmd_kernel(effective_config(kf));
    rmt::ExperimentConfig cfg = effective_config(vf);
    if (!suites.empty()) cfg.suites = suites;
    return rmt::cmd_verify(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
