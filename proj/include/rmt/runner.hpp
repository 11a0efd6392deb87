#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/params.hpp"

namespace rmt {

inline constexpr const char* kCodeVersion = "1.0.0";

// One experiment, deserialized from a single JSON config file. Unknown keys
// anywhere in the document are rejected.
struct ExperimentConfig {
  std::string ensemble = "elliptic";
  ModelParams params{};
  ChainConfig chain{};
  long draws = 1;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
  // kernel tabulation block
  std::string kernel_regime = "finite_n_sum";
  double alpha = 1.0;
  double x_global = 0.0;
  std::vector<std::pair<cd, cd>> grid;
  // verification selection
  std::vector<std::string> suites;
};

ExperimentConfig parse_config(const std::string& json_text);

// Canonical serialization (sorted keys, full precision); hashing this makes
// the config hash depend on the effective configuration after CLI overrides.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

// Length-prefixed little-endian eigenvalue records.
void write_eigenvalues_bin(const std::string& path,
                           const std::vector<SpectrumSample>& samples);
std::vector<SpectrumSample> read_eigenvalues_bin(const std::string& path);

// Commands. Each writes its outputs under cfg.out_dir and returns the
// process exit code. Reports also echo to stdout.
int cmd_params(const ExperimentConfig& cfg);
int cmd_sample(const ExperimentConfig& cfg);
int cmd_kernel(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);

}  // namespace rmt
