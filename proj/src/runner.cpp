#include "rmt/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rmt/kernels.hpp"
#include "rmt/stats.hpp"
#include "rmt/verify.hpp"

namespace rmt {

namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys = {"ensemble", "params", "chain",
                                       "draws",    "seed",   "out_dir",
                                       "threads",  "kernel", "suites"};
const std::set<std::string> kParamKeys = {"tau", "gamma", "k_p", "n", "t"};
const std::set<std::string> kChainKeys = {"step_size", "burn_in_sweeps",
                                          "thin_sweeps", "target_accept"};
const std::set<std::string> kKernelKeys = {"regime", "alpha", "x_global",
                                           "grid"};

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw std::invalid_argument("config: unknown key '" + item.key() +
                                  "' in " + where);
  }
}

std::string write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  return path;
}

struct Summary {
  double mean = 0.0, min = 0.0, max = 0.0;
};
Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.min = s.max = v[0];
  for (double x : v) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= double(v.size());
  return s;
}

json summary_json(const Summary& s) {
  return json{{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

json header_json(const ExperimentConfig& cfg) {
  return json{{"version", kCodeVersion},
              {"config_hash", config_hash(cfg)},
              {"seed", cfg.seed}};
}

void merge_header(json& j, const ExperimentConfig& cfg) {
  json head = header_json(cfg);  // named: items() must not outlive its json
  for (const auto& item : head.items()) j[item.key()] = item.value();
}

KernelRegime regime_of(const std::string& name) {
  if (name == "finite_n_sum") return KernelRegime::finite_n_sum;
  if (name == "contour_oracle" || name == "contour")
    return KernelRegime::contour_oracle;
  if (name == "strong_limit" || name == "strong")
    return KernelRegime::strong_limit;
  if (name == "weak_limit" || name == "weak") return KernelRegime::weak_limit;
  if (name == "weak_prop") return KernelRegime::weak_prop;
  throw std::invalid_argument("config: unknown kernel regime '" + name + "'");
}

struct EnsembleRoute {
  EnsembleTag tag;
  bool is_chain;
};
EnsembleRoute route_of(const std::string& name) {
  if (name == "gue") return {EnsembleTag::gue, false};
  if (name == "ginibre") return {EnsembleTag::ginibre, false};
  if (name == "elliptic") return {EnsembleTag::elliptic, false};
  if (name == "pab") return {EnsembleTag::pab, false};
  if (name == "ft_ginibre") return {EnsembleTag::ft_ginibre, false};
  if (name == "ft_elliptic") return {EnsembleTag::ft_elliptic, true};
  if (name == "trace_squared") return {EnsembleTag::trace_squared, true};
  if (name == "coulomb") return {EnsembleTag::coulomb, true};
  throw std::invalid_argument("config: unknown ensemble '" + name + "'");
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_object())
    throw std::invalid_argument("config: top level must be a JSON object");
  reject_unknown(j, kTopKeys, "top level");
  ExperimentConfig cfg;
  if (j.contains("ensemble")) cfg.ensemble = j["ensemble"].get<std::string>();
  if (j.contains("params")) {
    const json& p = j["params"];
    reject_unknown(p, kParamKeys, "params");
    if (p.contains("tau")) cfg.params.tau = p["tau"].get<double>();
    if (p.contains("gamma")) cfg.params.gamma = p["gamma"].get<double>();
    if (p.contains("k_p")) cfg.params.k_p = p["k_p"].get<double>();
    if (p.contains("n")) cfg.params.n = p["n"].get<int>();
    if (p.contains("t")) cfg.params.t = p["t"].get<double>();
  }
  if (j.contains("chain")) {
    const json& c = j["chain"];
    reject_unknown(c, kChainKeys, "chain");
    if (c.contains("step_size")) cfg.chain.step_size = c["step_size"].get<double>();
    if (c.contains("burn_in_sweeps"))
      cfg.chain.burn_in_sweeps = c["burn_in_sweeps"].get<long>();
    if (c.contains("thin_sweeps"))
      cfg.chain.thin_sweeps = c["thin_sweeps"].get<long>();
    if (c.contains("target_accept"))
      cfg.chain.target_accept = c["target_accept"].get<double>();
  }
  if (j.contains("draws")) cfg.draws = j["draws"].get<long>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    reject_unknown(k, kKernelKeys, "kernel");
    if (k.contains("regime")) cfg.kernel_regime = k["regime"].get<std::string>();
    if (k.contains("alpha")) cfg.alpha = k["alpha"].get<double>();
    if (k.contains("x_global")) cfg.x_global = k["x_global"].get<double>();
    if (k.contains("grid")) {
      for (const json& row : k["grid"]) {
        if (!row.is_array() || row.size() != 4)
          throw std::invalid_argument(
              "config: kernel grid rows must be [re1, im1, re2, im2]");
        cfg.grid.emplace_back(cd(row[0].get<double>(), row[1].get<double>()),
                              cd(row[2].get<double>(), row[3].get<double>()));
      }
    }
  }
  if (j.contains("suites")) {
    for (const json& s : j["suites"])
      cfg.suites.push_back(s.get<std::string>());
  }
  if (cfg.draws < 0) throw std::invalid_argument("config: draws must be >= 0");
  if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  route_of(cfg.ensemble);
  regime_of(cfg.kernel_regime);
  return cfg;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  json grid = json::array();
  for (const auto& [z1, z2] : cfg.grid)
    grid.push_back({z1.real(), z1.imag(), z2.real(), z2.imag()});
  json j{{"ensemble", cfg.ensemble},
         {"params",
          {{"tau", cfg.params.tau},
           {"gamma", cfg.params.gamma},
           {"k_p", cfg.params.k_p},
           {"n", cfg.params.n},
           {"t", cfg.params.t}}},
         {"chain",
          {{"step_size", cfg.chain.step_size},
           {"burn_in_sweeps", cfg.chain.burn_in_sweeps},
           {"thin_sweeps", cfg.chain.thin_sweeps},
           {"target_accept", cfg.chain.target_accept}}},
         {"draws", cfg.draws},
         {"seed", cfg.seed},
         {"kernel",
          {{"regime", cfg.kernel_regime},
           {"alpha", cfg.alpha},
           {"x_global", cfg.x_global},
           {"grid", grid}}},
         {"suites", cfg.suites}};
  // out_dir and threads do not change results, so they stay out of the hash.
  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string text = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_eigenvalues_bin(const std::string& path,
                           const std::vector<SpectrumSample>& samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write("RMTEVB1\n", 8);
  std::uint32_t count = std::uint32_t(samples.size());
  os.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& s : samples) {
    std::uint32_t n = std::uint32_t(s.eigenvalues.size());
    os.write(reinterpret_cast<const char*>(&n), 4);
    for (cd z : s.eigenvalues) {
      double re = z.real(), im = z.imag();
      os.write(reinterpret_cast<const char*>(&re), 8);
      os.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
}

std::vector<SpectrumSample> read_eigenvalues_bin(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "RMTEVB1\n", 8) != 0)
    throw std::runtime_error("not an eigenvalue record file: " + path);
  std::uint32_t count = 0;
  is.read(reinterpret_cast<char*>(&count), 4);
  std::vector<SpectrumSample> out(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 4);
    out[i].eigenvalues.resize(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      double re = 0.0, im = 0.0;
      is.read(reinterpret_cast<char*>(&re), 8);
      is.read(reinterpret_cast<char*>(&im), 8);
      out[i].eigenvalues[k] = cd(re, im);
    }
  }
  if (!is) throw std::runtime_error("truncated eigenvalue record file: " + path);
  return out;
}

int cmd_params(const ExperimentConfig& cfg) {
  const ModelParams& p = cfg.params;
  DerivedParams d = derive(p);
  json j = header_json(cfg);
  j["params"] = {{"tau", p.tau}, {"gamma", p.gamma}, {"k_p", p.k_p},
                 {"n", p.n},     {"t", p.t}};
  j["k"] = d.k;
  j["kbar"] = kbar(p.gamma, p.k_p);
  j["k_ft"] = k_ft(p.tau, p.k_p);
  j["c_weak"] = d.c_weak;
  j["c_kbar"] = d.c_kbar;
  j["a_t"] = {d.a_t.real(), d.a_t.imag()};
  j["b"] = d.b;
  j["ellipse"] = {{"q_re", d.ellipse.q_re},
                  {"q_im", d.ellipse.q_im},
                  {"bound", d.ellipse.bound},
                  {"semi_re", d.ellipse.semi_re()},
                  {"semi_im", d.ellipse.semi_im()},
                  {"degenerate", d.ellipse.degenerate}};
  if (cfg.alpha > 0.0 &&
      std::abs(cfg.x_global) < 2.0 / std::sqrt(d.c_weak)) {
    WeakScaling ws = weak_scaling(cfg.x_global, cfg.alpha, d.c_weak);
    j["weak"] = {{"x", ws.x},
                 {"alpha", ws.alpha},
                 {"nu", ws.nu},
                 {"alpha_tilde", ws.alpha_tilde},
                 {"tau_n", ws.tau_n(p.n)},
                 {"local_scale", ws.local_scale(p.n)}};
  } else {
    j["weak"] = nullptr;
  }
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  ensure_out_dir(cfg);
  write_text(join_path(cfg.out_dir, "params.json"), text);
  return 0;
}

int cmd_sample(const ExperimentConfig& cfg) {
  EnsembleRoute route = route_of(cfg.ensemble);
  validate(cfg.params);
  const int n = cfg.params.n;
  std::vector<SpectrumSample> samples;
  if (!route.is_chain) {
    samples.resize(size_t(cfg.draws));
    long total = cfg.draws;
    int nw = std::max(1, std::min<int>(cfg.threads, int(std::min<long>(total, 64))));
    std::atomic<long> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto one = [&](long d) {
      ComplexMatrix m;
      switch (route.tag) {
        case EnsembleTag::gue: m = sample_gue(n, cfg.seed, uint64_t(d)); break;
        case EnsembleTag::ginibre:
          m = sample_ginibre(n, cfg.seed, uint64_t(d));
          break;
        case EnsembleTag::elliptic:
          m = sample_elliptic(n, cfg.params.tau, cfg.seed, uint64_t(d));
          break;
        case EnsembleTag::pab: {
          SamplerConfig sc{cfg.params, cfg.seed, cfg.chain};
          m = sample_pab(sc, uint64_t(d));
          break;
        }
        case EnsembleTag::ft_ginibre:
          m = sample_ft_ginibre(n, cfg.params.k_p, cfg.seed, uint64_t(d));
          break;
        default: break;
      }
      samples[size_t(d)] = spectrum_of(m, route.tag, cfg.seed);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          long d = cursor.fetch_add(1);
          if (d >= total) return;
          try {
            one(d);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  } else {
    SamplerConfig sc{cfg.params, cfg.seed, cfg.chain};
    samples.reserve(size_t(cfg.draws));
    if (route.tag == EnsembleTag::coulomb) {
      CoulombChain chain(sc);
      for (long d = 0; d < cfg.draws; ++d) samples.push_back(chain.next());
    } else if (route.tag == EnsembleTag::ft_elliptic) {
      FtEllipticChain chain(sc);
      for (long d = 0; d < cfg.draws; ++d) samples.push_back(chain.next());
    } else {
      TraceSquaredChain chain(sc);
      for (long d = 0; d < cfg.draws; ++d) samples.push_back(chain.next());
    }
  }

  ensure_out_dir(cfg);
  write_eigenvalues_bin(join_path(cfg.out_dir, "eigenvalues.bin"), samples);

  std::vector<double> rates, traces;
  std::vector<std::string> warnings;
  long count = 0;
  for (const auto& s : samples) {
    rates.push_back(s.accept_rate);
    traces.push_back(s.trace_jj);
    count += long(s.eigenvalues.size());
    if (!s.warning.empty() &&
        std::find(warnings.begin(), warnings.end(), s.warning) == warnings.end())
      warnings.push_back(s.warning);
  }
  json j = header_json(cfg);
  j["ensemble"] = cfg.ensemble;
  j["params"] = {{"tau", cfg.params.tau}, {"gamma", cfg.params.gamma},
                 {"k_p", cfg.params.k_p}, {"n", cfg.params.n},
                 {"t", cfg.params.t}};
  if (route.is_chain)
    j["chain"] = {{"step_size", cfg.chain.step_size},
                  {"burn_in_sweeps", cfg.chain.burn_in_sweeps},
                  {"thin_sweeps", cfg.chain.thin_sweeps},
                  {"target_accept", cfg.chain.target_accept}};
  j["draws"] = cfg.draws;
  j["eigenvalue_count"] = count;
  j["accept_rate"] = summary_json(summarize(rates));
  // Fixed-trace ensembles pin tr JJ* = n k_p by construction; the summary
  // below shows the recomputed value with its roundoff.
  if (route.tag == EnsembleTag::ft_ginibre ||
      route.tag == EnsembleTag::ft_elliptic)
    j["trace_jj"] = double(cfg.params.n) * cfg.params.k_p;
  j["trace_jj_measured"] = summary_json(summarize(traces));
  j["warnings"] = warnings;
  j["files"] = {{"eigenvalues", "eigenvalues.bin"}};
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_text(join_path(cfg.out_dir, "metadata.json"), text);
  if (!warnings.empty()) {
    std::cerr << "sampler diagnostics unhealthy:";
    for (const auto& w : warnings) std::cerr << " [" << w << "]";
    std::cerr << "\n";
    return 3;
  }
  return 0;
}

int cmd_kernel(const ExperimentConfig& cfg) {
  if (cfg.grid.empty())
    throw std::invalid_argument("cmd_kernel: config kernel.grid is empty");
  KernelContext ctx = make_context(cfg.params, regime_of(cfg.kernel_regime),
                                   cfg.alpha, cfg.x_global);
  KernelProfile prof = evaluate_profile(cfg.grid, ctx);
  ensure_out_dir(cfg);
  std::string head = "# version=" + std::string(kCodeVersion) +
                     "\n# config_hash=" + config_hash(cfg) +
                     "\n# seed=" + std::to_string(cfg.seed) + "\n";
  write_text(join_path(cfg.out_dir, "profile.csv"), head + profile_csv(prof));
  json j = json::parse(profile_json(prof, ctx));
  merge_header(j, cfg);
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_text(join_path(cfg.out_dir, "profile.json"), text);
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
  std::vector<int> ids = select_criteria(cfg.suites);
  json report = header_json(cfg);
  report["threads"] = cfg.threads;
  report["criteria"] = json::array();
  int failed = 0;
  for (int id : ids) {
    CriterionResult res = run_criterion(id, cfg.seed, cfg.threads);
    if (!res.passed) ++failed;
    std::printf("criterion %02d %-22s [%s] %s %.1f s\n", res.id,
                res.name.c_str(), res.suite.c_str(),
                res.passed ? "PASS" : "FAIL", res.seconds);
    json checks = json::array();
    for (const auto& c : res.checks) {
      std::printf("    %-58s measured %.6g target %.6g %s\n", c.label.c_str(),
                  c.measured, c.bound, c.pass ? "ok" : "VIOLATED");
      checks.push_back({{"label", c.label},
                        {"measured", c.measured},
                        {"target", c.bound},
                        {"pass", c.pass}});
    }
    report["criteria"].push_back({{"id", res.id},
                                  {"name", res.name},
                                  {"suite", res.suite},
                                  {"passed", res.passed},
                                  {"seconds", res.seconds},
                                  {"checks", checks}});
  }
  report["selected"] = long(ids.size());
  report["failed"] = failed;
  if (ids.empty()) std::printf("no criteria selected; trivially passing\n");
  ensure_out_dir(cfg);
  write_text(join_path(cfg.out_dir, "verify.json"), report.dump(2) + "\n");
  return std::min(failed, 125);
}

}  // namespace rmt
