#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmt/cmatrix.hpp"
#include "rmt/params.hpp"
#include "rmt/rng.hpp"

namespace rmt {

enum class EnsembleTag {
  gue,
  ginibre,
  elliptic,
  pab,
  ft_ginibre,
  ft_elliptic,
  trace_squared,
  coulomb,
};

const char* to_string(EnsembleTag tag);

// Metropolis chain controls. Sweep units: one sweep is one proposal per
// degree of freedom (n^2 matrix entries, or n eigenvalues for coulomb).
struct ChainConfig {
  double step_size = 0.0;       // 0 = scale-aware default
  long burn_in_sweeps = 100000;
  long thin_sweeps = 0;         // sweeps between kept states; 0 = n
  double target_accept = 0.3;   // adaptation target, burn-in only
};

struct SamplerConfig {
  ModelParams params;
  uint64_t seed = 1;
  ChainConfig chain;
};

struct SpectrumSample {
  std::vector<cd> eigenvalues;  // (Re, Im)-lex sorted
  EnsembleTag tag = EnsembleTag::gue;
  uint64_t seed = 0;
  double accept_rate = 1.0;     // exact samplers report 1
  double trace_jj = 0.0;        // sum of squared singular values of the state
  std::string warning;          // nonempty when chain diagnostics look unhealthy
};

// Eigensolve a matrix state into a SpectrumSample.
SpectrumSample spectrum_of(const ComplexMatrix& m, EnsembleTag tag, uint64_t seed,
                           double accept_rate = 1.0, const std::string& warning = {});

// Exact samplers. `draw` selects an independent member of the stream; the
// (seed, draw, entry) triple fixes every matrix entry independently of
// generation order.
ComplexMatrix sample_gue(int n, uint64_t seed, uint64_t draw = 0);
ComplexMatrix sample_ginibre(int n, uint64_t seed, uint64_t draw = 0);
ComplexMatrix sample_elliptic(int n, double tau, uint64_t seed, uint64_t draw = 0);
ComplexMatrix sample_pab(const SamplerConfig& cfg, uint64_t draw = 0);
ComplexMatrix sample_ft_ginibre(int n, double k_p, uint64_t seed, uint64_t draw = 0);

// Shared plumbing of the single-site Metropolis matrix chains.
class MatrixChain {
 public:
  virtual ~MatrixChain() = default;

  // Advance thin_sweeps sweeps and return the current state. The first call
  // is preceded by burn-in with step adaptation.
  const ComplexMatrix& next_matrix();
  SpectrumSample next();  // next_matrix + eigensolve

  double accept_rate() const;   // running rate since burn-in ended
  double step_size() const { return step_; }
  double trace_jj() const { return last_trace_jj_; }
  const std::string& warning() const { return warning_; }

 protected:
  MatrixChain(const SamplerConfig& cfg, EnsembleTag tag);

  virtual void do_sweep() = 0;          // one proposal per entry
  virtual void refresh_totals() = 0;    // exact recompute of tracked scalars
  virtual void materialize() = 0;       // write state_ from internal form

  void run_sweeps(long count, bool adapt);
  void record(bool accepted);
  virtual double step_cap() const { return 1e9; }

  SamplerConfig cfg_;
  EnsembleTag tag_;
  ComplexMatrix state_;
  RngStream rng_;
  double step_ = 0.0;
  double last_trace_jj_ = 0.0;
  std::string warning_;

 private:
  void ensure_ready();
  bool ready_ = false;
  long sweeps_done_ = 0;
  long sweep_accepts_ = 0, sweep_proposals_ = 0;
  long run_accepts_ = 0, run_proposals_ = 0;
};

// Fixed-trace elliptic interpolation: Metropolis on the sphere
// tr JJ* = n k_p with target exponent (tau n / (1 - tau^2)) Re tr J^2.
// Single-entry Gaussian steps with the sphere renormalization folded into a
// lazy global scale; the renormalization asymmetry is O(step^2/radius^2) and
// the proposal is treated as symmetric, with steps capped at
// 1e-2 * sqrt(n k_p). A great-circle (geodesic) proposal is available for
// cross-checks; it is exactly symmetric but costs O(n^2) per proposal.
class FtEllipticChain : public MatrixChain {
 public:
  enum class Proposal { entry, geodesic };
  explicit FtEllipticChain(const SamplerConfig& cfg, Proposal kind = Proposal::entry);

  double trace_j2_re() const { return t2_.real() * radius_sq_ / s2_; }

 protected:
  void do_sweep() override;
  void refresh_totals() override;
  void materialize() override;
  double step_cap() const override;

 private:
  void entry_sweep();
  void geodesic_sweep();

  Proposal kind_;
  double tilt_;        // tau n / (1 - tau^2)
  double radius_sq_;   // n k_p
  double s2_ = 0.0;    // tr MM* of the unscaled state
  cd t2_;              // tr M^2 of the unscaled state
  long recompute_countdown_ = 0;
};

// Free-matrix chain with log-density
//   -n/(1-tau^2) (tr JJ* - tau Re tr J^2) - gamma (tr JJ* - n k_p)^2.
class TraceSquaredChain : public MatrixChain {
 public:
  explicit TraceSquaredChain(const SamplerConfig& cfg);

 protected:
  void do_sweep() override;
  void refresh_totals() override;
  void materialize() override;

 private:
  double quad_;        // n / (1 - tau^2)
  double radius_sq_;   // n k_p
  double s2_ = 0.0;
  cd t2_;
  long recompute_countdown_ = 0;
};

// Eigenvalue-level chain with log-density
//   sum_{j<l} 2 log|z_j - z_l|
//   - n/(1-tau^2) (sum |z|^2 - tau Re sum z^2) - gamma (sum |z|^2 - n k_p)^2.
// Single-eigenvalue moves; proposals coinciding with another eigenvalue are
// rejected outright.
class CoulombChain {
 public:
  explicit CoulombChain(const SamplerConfig& cfg);

  SpectrumSample next();
  double accept_rate() const;
  double step_size() const { return step_; }

 private:
  void do_sweep(bool adapt);
  void ensure_ready();

  SamplerConfig cfg_;
  RngStream rng_;
  std::vector<cd> z_;
  double quad_, radius_sq_;
  double s2_ = 0.0;
  double step_;
  bool ready_ = false;
  long sweeps_done_ = 0;
  long run_accepts_ = 0, run_proposals_ = 0;
};

}  // namespace rmt
