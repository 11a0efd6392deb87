#include "rmt/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmt {

namespace {

// Stream namespaces. Chain initial states draw through a remixed seed so they
// never collide with user-visible exact-sampler draws under the same seed.
constexpr uint64_t kTagGue = 1;
constexpr uint64_t kTagGauss = 2;  // elliptic / ginibre / pab share one core
constexpr uint64_t kTagFtGinibre = 3;
constexpr uint64_t kTagFtElliptic = 4;
constexpr uint64_t kTagTraceSquared = 5;
constexpr uint64_t kTagCoulomb = 6;

uint64_t stream_id(uint64_t tag, uint64_t draw, uint64_t entry) {
  return (tag << 56) | ((draw & 0xFFFFFFFFull) << 24) | (entry & 0xFFFFFFull);
}

uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_dim(int n) {
  if (n < 1 || n > 2048) throw std::domain_error("sampler: dimension out of range");
}

void check_chain(const ChainConfig& c) {
  if (c.step_size < 0.0) throw std::domain_error("chain: step_size must be >= 0");
  if (c.burn_in_sweeps < 0) throw std::domain_error("chain: burn_in_sweeps must be >= 0");
  if (c.thin_sweeps < 0) throw std::domain_error("chain: thin_sweeps must be >= 0");
  if (!(c.target_accept > 0.0 && c.target_accept < 1.0))
    throw std::domain_error("chain: target_accept must lie in (0, 1)");
}

double kahan_abs2(const ComplexMatrix& m) {
  double s = 0.0, comp = 0.0;
  for (const cd& v : m.a) {
    double term = std::norm(v) - comp;
    double t = s + term;
    comp = (t - s) - term;
    s = t;
  }
  return s;
}

cd trace_sq(const ComplexMatrix& m) {
  cd s(0.0, 0.0);
  for (int j = 0; j < m.n; ++j)
    for (int k = 0; k < m.n; ++k) s += m.at(j, k) * m.at(k, j);
  return s;
}

ComplexMatrix gauss_core(int n, const PabCovariance& cov, uint64_t seed, uint64_t draw) {
  ComplexMatrix m(n);
  double sd_re = std::sqrt(cov.var_diag_re);
  double sd_im = std::sqrt(cov.var_diag_im);
  double lp = std::sqrt(cov.lambda_plus_sq);
  double lm = std::sqrt(cov.lambda_minus_sq);
  double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    RngStream rs(seed, stream_id(kTagGauss, draw, uint64_t(j) * n + j));
    cd z = rs.normal_pair();
    m.at(j, j) = cd(sd_re * z.real(), sd_im * z.imag());
  }
  // Off-diagonal pair (j,k),(k,j): rotate independent normals so that both
  // real parts have variance var_off with covariance cov_real, and both
  // imaginary parts have variance var_off with covariance -cov_real.
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      RngStream rs(seed, stream_id(kTagGauss, draw, uint64_t(j) * n + k));
      cd s = rs.normal_pair();
      cd t = rs.normal_pair();
      double sp = lp * s.real(), sm = lm * s.imag();
      double tp = lm * t.real(), tm = lp * t.imag();
      m.at(j, k) = cd((sp + sm) * inv_rt2, (tp + tm) * inv_rt2);
      m.at(k, j) = cd((sp - sm) * inv_rt2, (tp - tm) * inv_rt2);
    }
  }
  return m;
}

}  // namespace

const char* to_string(EnsembleTag tag) {
  switch (tag) {
    case EnsembleTag::gue: return "gue";
    case EnsembleTag::ginibre: return "ginibre";
    case EnsembleTag::elliptic: return "elliptic";
    case EnsembleTag::pab: return "pab";
    case EnsembleTag::ft_ginibre: return "ft_ginibre";
    case EnsembleTag::ft_elliptic: return "ft_elliptic";
    case EnsembleTag::trace_squared: return "trace_squared";
    case EnsembleTag::coulomb: return "coulomb";
  }
  return "unknown";
}

SpectrumSample spectrum_of(const ComplexMatrix& m, EnsembleTag tag, uint64_t seed,
                           double accept_rate, const std::string& warning) {
  SpectrumSample out;
  out.eigenvalues = eigenvalues(m).values;
  out.tag = tag;
  out.seed = seed;
  out.accept_rate = accept_rate;
  out.trace_jj = kahan_abs2(m);
  out.warning = warning;
  return out;
}

ComplexMatrix sample_gue(int n, uint64_t seed, uint64_t draw) {
  check_dim(n);
  ComplexMatrix m(n);
  double sd = std::sqrt(1.0 / (2.0 * n));
  double so = std::sqrt(1.0 / (4.0 * n));
  for (int j = 0; j < n; ++j) {
    RngStream rs(seed, stream_id(kTagGue, draw, uint64_t(j) * n + j));
    m.at(j, j) = cd(sd * rs.normal_pair().real(), 0.0);
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      RngStream rs(seed, stream_id(kTagGue, draw, uint64_t(j) * n + k));
      cd z = rs.normal_pair();
      m.at(j, k) = so * cd(z.real(), z.imag());
      m.at(k, j) = std::conj(m.at(j, k));
    }
  }
  return m;
}

ComplexMatrix sample_elliptic(int n, double tau, uint64_t seed, uint64_t draw) {
  check_dim(n);
  ModelParams p{tau, 0.0, 1.0, n, 0.0};
  validate(p);
  return gauss_core(n, covariance_pab(p), seed, draw);
}

ComplexMatrix sample_ginibre(int n, uint64_t seed, uint64_t draw) {
  return sample_elliptic(n, 0.0, seed, draw);
}

ComplexMatrix sample_pab(const SamplerConfig& cfg, uint64_t draw) {
  validate(cfg.params);
  check_dim(cfg.params.n);
  return gauss_core(cfg.params.n, covariance_pab(cfg.params), cfg.seed, draw);
}

ComplexMatrix sample_ft_ginibre(int n, double k_p, uint64_t seed, uint64_t draw) {
  check_dim(n);
  if (!(k_p > 0.0)) throw std::domain_error("sample_ft_ginibre: k_p must be positive");
  ComplexMatrix m(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      RngStream rs(seed, stream_id(kTagFtGinibre, draw, uint64_t(j) * n + k));
      m.at(j, k) = rs.normal_pair();
    }
  double s = kahan_abs2(m);
  double beta = std::sqrt(double(n) * k_p / s);
  for (cd& v : m.a) v *= beta;
  return m;
}

MatrixChain::MatrixChain(const SamplerConfig& cfg, EnsembleTag tag)
    : cfg_(cfg), tag_(tag),
      rng_(cfg.seed, stream_id(tag == EnsembleTag::ft_elliptic ? kTagFtElliptic
                                                               : kTagTraceSquared,
                               0, 0)) {
  validate(cfg_.params);
  check_dim(cfg_.params.n);
  check_chain(cfg_.chain);
}

void MatrixChain::record(bool accepted) {
  ++sweep_proposals_;
  ++run_proposals_;
  if (accepted) {
    ++sweep_accepts_;
    ++run_accepts_;
  }
}

double MatrixChain::accept_rate() const {
  return run_proposals_ > 0 ? double(run_accepts_) / double(run_proposals_) : 1.0;
}

void MatrixChain::run_sweeps(long count, bool adapt) {
  for (long s = 0; s < count; ++s) {
    sweep_accepts_ = sweep_proposals_ = 0;
    do_sweep();
    ++sweeps_done_;
    if (adapt && sweep_proposals_ > 0) {
      double rate = double(sweep_accepts_) / double(sweep_proposals_);
      double gain = 1.0 / std::pow(double(sweeps_done_), 0.6);
      step_ *= std::exp(gain * (rate - cfg_.chain.target_accept));
    }
    step_ = std::min(step_, step_cap());
    if (sweeps_done_ % 32 == 0) refresh_totals();
  }
}

void MatrixChain::ensure_ready() {
  if (ready_) return;
  refresh_totals();
  run_sweeps(cfg_.chain.burn_in_sweeps, true);
  run_accepts_ = run_proposals_ = 0;
  ready_ = true;
}

const ComplexMatrix& MatrixChain::next_matrix() {
  ensure_ready();
  long thin = cfg_.chain.thin_sweeps > 0 ? cfg_.chain.thin_sweeps : cfg_.params.n;
  run_sweeps(thin, false);
  refresh_totals();
  materialize();
  last_trace_jj_ = kahan_abs2(state_);
  double rate = accept_rate();
  if (run_proposals_ > 0 && (rate < 0.05 || rate > 0.95))
    warning_ = "acceptance rate " + std::to_string(rate) + " outside [0.05, 0.95]";
  return state_;
}

SpectrumSample MatrixChain::next() {
  const ComplexMatrix& m = next_matrix();
  SpectrumSample out = spectrum_of(m, tag_, cfg_.seed, accept_rate(), warning_);
  out.trace_jj = last_trace_jj_;
  return out;
}

FtEllipticChain::FtEllipticChain(const SamplerConfig& cfg, Proposal kind)
    : MatrixChain(cfg, EnsembleTag::ft_elliptic), kind_(kind) {
  const ModelParams& p = cfg_.params;
  tilt_ = p.tau * double(p.n) / (1.0 - p.tau * p.tau);
  radius_sq_ = double(p.n) * p.k_p;
  state_ = sample_elliptic(p.n, p.tau, mix64(cfg_.seed ^ 0xF7E111A57ull), 0);
  step_ = cfg_.chain.step_size > 0.0
              ? cfg_.chain.step_size
              : (kind_ == Proposal::entry ? std::sqrt(radius_sq_) / double(p.n)
                                          : 0.5 / double(p.n));
}

double FtEllipticChain::step_cap() const {
  if (kind_ == Proposal::geodesic) return 1.0;
  return 0.01 * std::sqrt(s2_ > 0.0 ? s2_ : radius_sq_);
}

void FtEllipticChain::refresh_totals() {
  double s = kahan_abs2(state_);
  double beta = std::sqrt(radius_sq_ / s);
  for (cd& v : state_.a) v *= beta;
  s2_ = kahan_abs2(state_);
  t2_ = trace_sq(state_);
}

void FtEllipticChain::materialize() {
  // refresh_totals has just renormalized onto the sphere; nothing to scale.
}

void FtEllipticChain::do_sweep() {
  if (kind_ == Proposal::entry)
    entry_sweep();
  else
    geodesic_sweep();
}

void FtEllipticChain::entry_sweep() {
  int n = state_.n;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cd delta = step_ * rng_.normal_pair();
      cd old = state_.at(j, k);
      double ds2 = 2.0 * (old.real() * delta.real() + old.imag() * delta.imag()) +
                   std::norm(delta);
      double s2n = s2_ + ds2;
      cd t2n = t2_ + 2.0 * delta * state_.at(k, j) + (j == k ? delta * delta : cd());
      double log_a = tilt_ * radius_sq_ * (t2n.real() / s2n - t2_.real() / s2_);
      bool acc = log_a >= 0.0 || rng_.uniform01() < std::exp(log_a);
      if (acc) {
        state_.at(j, k) = old + delta;
        s2_ = s2n;
        t2_ = t2n;
      }
      record(acc);
    }
  }
}

void FtEllipticChain::geodesic_sweep() {
  // One great-circle move counts as a sweep: it displaces every entry.
  int n = state_.n;
  ComplexMatrix dir(n);
  for (cd& v : dir.a) v = rng_.normal_pair();
  double inner = 0.0;
  for (size_t i = 0; i < dir.a.size(); ++i) {
    inner += state_.a[i].real() * dir.a[i].real() +
             state_.a[i].imag() * dir.a[i].imag();
  }
  double tn2 = 0.0;
  for (size_t i = 0; i < dir.a.size(); ++i) {
    dir.a[i] -= (inner / s2_) * state_.a[i];
    tn2 += std::norm(dir.a[i]);
  }
  if (tn2 == 0.0) {
    record(false);
    return;
  }
  double scale = std::sqrt(s2_ / tn2);
  double c = std::cos(step_), s = std::sin(step_);
  ComplexMatrix prop(n);
  for (size_t i = 0; i < dir.a.size(); ++i)
    prop.a[i] = c * state_.a[i] + s * scale * dir.a[i];
  double s2n = kahan_abs2(prop);
  cd t2n = trace_sq(prop);
  double log_a = tilt_ * radius_sq_ * (t2n.real() / s2n - t2_.real() / s2_);
  bool acc = log_a >= 0.0 || rng_.uniform01() < std::exp(log_a);
  if (acc) {
    state_ = prop;
    s2_ = s2n;
    t2_ = t2n;
  }
  record(acc);
}

TraceSquaredChain::TraceSquaredChain(const SamplerConfig& cfg)
    : MatrixChain(cfg, EnsembleTag::trace_squared) {
  const ModelParams& p = cfg_.params;
  quad_ = double(p.n) / (1.0 - p.tau * p.tau);
  radius_sq_ = double(p.n) * p.k_p;
  SamplerConfig init = cfg_;
  init.seed = mix64(cfg_.seed ^ 0x7A5CE5D1Full);
  state_ = sample_pab(init, 0);
  step_ = cfg_.chain.step_size > 0.0
              ? cfg_.chain.step_size
              : 2.4 * std::sqrt(covariance_pab(p).var_off);
}

void TraceSquaredChain::refresh_totals() {
  s2_ = kahan_abs2(state_);
  t2_ = trace_sq(state_);
}

void TraceSquaredChain::materialize() {}

void TraceSquaredChain::do_sweep() {
  int n = state_.n;
  double tau = cfg_.params.tau, gamma = cfg_.params.gamma;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cd delta = step_ * rng_.normal_pair();
      cd old = state_.at(j, k);
      double ds2 = 2.0 * (old.real() * delta.real() + old.imag() * delta.imag()) +
                   std::norm(delta);
      double s2n = s2_ + ds2;
      cd t2n = t2_ + 2.0 * delta * state_.at(k, j) + (j == k ? delta * delta : cd());
      double log_a = -quad_ * (ds2 - tau * (t2n.real() - t2_.real()));
      if (gamma > 0.0) {
        double d0 = s2_ - radius_sq_, d1 = s2n - radius_sq_;
        log_a -= gamma * (d1 * d1 - d0 * d0);
      }
      bool acc = log_a >= 0.0 || rng_.uniform01() < std::exp(log_a);
      if (acc) {
        state_.at(j, k) = old + delta;
        s2_ = s2n;
        t2_ = t2n;
      }
      record(acc);
    }
  }
}

CoulombChain::CoulombChain(const SamplerConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed, stream_id(kTagCoulomb, 0, 0)) {
  validate(cfg_.params);
  check_dim(cfg_.params.n);
  check_chain(cfg_.chain);
  const ModelParams& p = cfg_.params;
  quad_ = double(p.n) / (1.0 - p.tau * p.tau);
  radius_sq_ = double(p.n) * p.k_p;
  z_.resize(size_t(p.n));
  double spread = 0.7 * std::sqrt(std::max(p.k_p, 1.0));
  for (cd& v : z_) v = spread * rng_.normal_pair();
  step_ = cfg_.chain.step_size > 0.0
              ? cfg_.chain.step_size
              : std::sqrt((1.0 - p.tau * p.tau) / (2.0 * p.n));
}

double CoulombChain::accept_rate() const {
  return run_proposals_ > 0 ? double(run_accepts_) / double(run_proposals_) : 1.0;
}

void CoulombChain::do_sweep(bool adapt) {
  int n = int(z_.size());
  double tau = cfg_.params.tau, gamma = cfg_.params.gamma;
  long acc_count = 0;
  for (int m = 0; m < n; ++m) {
    cd old = z_[size_t(m)];
    cd zn = old + step_ * rng_.normal_pair();
    bool coincident = false;
    double d_rep = 0.0;
    for (int l = 0; l < n; ++l) {
      if (l == m) continue;
      cd dn = zn - z_[size_t(l)];
      if (dn.real() == 0.0 && dn.imag() == 0.0) {
        coincident = true;
        break;
      }
      d_rep += std::log(std::norm(dn) / std::norm(old - z_[size_t(l)]));
    }
    bool acc = false;
    if (!coincident) {
      double ds2 = std::norm(zn) - std::norm(old);
      double dt2 = (zn * zn - old * old).real();
      double log_a = d_rep - quad_ * (ds2 - tau * dt2);
      if (gamma > 0.0) {
        double d0 = s2_ - radius_sq_, d1 = s2_ + ds2 - radius_sq_;
        log_a -= gamma * (d1 * d1 - d0 * d0);
      }
      acc = log_a >= 0.0 || rng_.uniform01() < std::exp(log_a);
      if (acc) {
        z_[size_t(m)] = zn;
        s2_ += ds2;
      }
    }
    if (acc) ++acc_count;
    ++run_proposals_;
    if (acc) ++run_accepts_;
  }
  ++sweeps_done_;
  if (adapt) {
    double rate = double(acc_count) / double(n);
    double gain = 1.0 / std::pow(double(sweeps_done_), 0.6);
    step_ *= std::exp(gain * (rate - cfg_.chain.target_accept));
  }
  if (sweeps_done_ % 64 == 0) {
    double s = 0.0;
    for (const cd& v : z_) s += std::norm(v);
    s2_ = s;
  }
}

void CoulombChain::ensure_ready() {
  if (ready_) return;
  double s = 0.0;
  for (const cd& v : z_) s += std::norm(v);
  s2_ = s;
  for (long b = 0; b < cfg_.chain.burn_in_sweeps; ++b) do_sweep(true);
  run_accepts_ = run_proposals_ = 0;
  ready_ = true;
}

SpectrumSample CoulombChain::next() {
  ensure_ready();
  long thin = cfg_.chain.thin_sweeps > 0 ? cfg_.chain.thin_sweeps : cfg_.params.n;
  for (long s = 0; s < thin; ++s) do_sweep(false);
  double s2 = 0.0;
  for (const cd& v : z_) s2 += std::norm(v);
  s2_ = s2;

  SpectrumSample out;
  out.eigenvalues = z_;
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  out.tag = EnsembleTag::coulomb;
  out.seed = cfg_.seed;
  out.accept_rate = accept_rate();
  out.trace_jj = s2;
  double rate = accept_rate();
  if (run_proposals_ > 0 && (rate < 0.05 || rate > 0.95))
    out.warning = "acceptance rate " + std::to_string(rate) + " outside [0.05, 0.95]";
  return out;
}

}  // namespace rmt
