#include "rmt/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmt {

namespace {

double sq(double x) { return x * x; }

// Cubic whose rightmost admissible root is K.
struct KCubic {
  double c3, c2, c1, c0;
  KCubic(double tau, double gamma, double k_p) {
    const double omt2 = 1.0 - tau * tau;
    c3 = 4.0 * sq(gamma) * omt2;
    c2 = 4.0 * gamma * (1.0 + gamma * omt2 * k_p);
    c1 = 1.0 + 4.0 * gamma * k_p - 2.0 * gamma * omt2;
    c0 = k_p - 1.0;
  }
  double f(double k) const { return ((c3 * k + c2) * k + c1) * k + c0; }
  double df(double k) const { return (3.0 * c3 * k + 2.0 * c2) * k + c1; }
};

// Residual of the self-consistency relation
// k_p + k = (1 + 2 gamma k (1-tau^2)) / (1 + 4 gamma k + 4 gamma^2 k^2 (1-tau^2)).
double relation_residual(double tau, double gamma, double k_p, double k) {
  const double omt2 = 1.0 - tau * tau;
  const double den = 1.0 + 4.0 * gamma * k + 4.0 * sq(gamma * k) * omt2;
  return k_p + k - (1.0 + 2.0 * gamma * k * omt2) / den;
}

}  // namespace

void validate(const ModelParams& p) {
  if (!(p.tau > -1.0 && p.tau < 1.0)) throw std::domain_error("tau must lie in (-1, 1)");
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) throw std::domain_error("gamma must be >= 0");
  if (!(p.k_p > 0.0) || !std::isfinite(p.k_p)) throw std::domain_error("k_p must be > 0");
  if (p.n < 2) throw std::domain_error("n must be >= 2");
  if (!std::isfinite(p.t)) throw std::domain_error("t must be finite");
}

double solve_k(double tau, double gamma, double k_p) {
  if (!(tau > -1.0 && tau < 1.0)) throw std::domain_error("solve_k: tau must lie in (-1, 1)");
  if (!(gamma >= 0.0)) throw std::domain_error("solve_k: gamma must be >= 0");
  if (!(k_p > 0.0)) throw std::domain_error("solve_k: k_p must be > 0");
  if (gamma == 0.0) return 1.0 - k_p;
  if (k_p == 1.0) return 0.0;  // exact root for every (tau, gamma)

  const KCubic cub(tau, gamma, k_p);
  // Admissible region: strictly right of both simple poles of the relation.
  const double pole = -1.0 / (2.0 * gamma * (1.0 + std::abs(tau)));
  double lo = pole + 1e-9;
  // Cauchy-style bound on all roots keeps the bracket finite.
  double hi = 1.0 + std::max({std::abs(cub.c0), std::abs(cub.c1), std::abs(cub.c2)}) / cub.c3;
  if (!(cub.f(lo) < 0.0 && cub.f(hi) > 0.0)) {
    throw std::runtime_error("solve_k: bracket does not enclose the admissible root");
  }
  // Safeguarded Newton: bisect whenever the Newton step leaves the bracket.
  double k = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double fv = cub.f(k);
    if (fv < 0.0) lo = k; else hi = k;
    double d = cub.df(k);
    double kn = (d != 0.0) ? k - fv / d : k;
    if (!(kn > lo && kn < hi)) kn = 0.5 * (lo + hi);
    if (std::abs(kn - k) <= 1e-16 * std::max(1.0, std::abs(k))) {
      k = kn;
      break;
    }
    k = kn;
  }
  if (std::abs(relation_residual(tau, gamma, k_p, k)) > 1e-12) {
    throw std::runtime_error("solve_k: self-consistency residual above 1e-12");
  }
  return k;
}

double kbar(double gamma, double k_p) {
  if (!(gamma >= 0.0)) throw std::domain_error("kbar: gamma must be >= 0");
  if (!(k_p > 0.0)) throw std::domain_error("kbar: k_p must be > 0");
  if (gamma == 0.0) return 1.0 - k_p;  // continuity with solve_k
  const double rad = 16.0 * sq(gamma * k_p) - 8.0 * gamma * k_p + 16.0 * gamma + 1.0;
  return -0.5 * k_p - 1.0 / (8.0 * gamma) + std::sqrt(rad) / (8.0 * gamma);
}

double k_ft(double tau, double k_p) {
  if (!(tau > -1.0 && tau < 1.0)) throw std::domain_error("k_ft: tau must lie in (-1, 1)");
  if (!(k_p > 0.0)) throw std::domain_error("k_ft: k_p must be > 0");
  const double omt2 = 1.0 - tau * tau;
  const double A = 4.0 * omt2 * k_p;
  const double B = 4.0 * k_p - 2.0 * omt2;
  const double C = k_p - 1.0;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw std::runtime_error("k_ft: no real root");
  // Stable split: q and C/q are the two roots; rightmost is their max.
  const double sd = std::sqrt(disc);
  const double q = -0.5 * (B + (B >= 0.0 ? sd : -sd));
  double r1 = q / A;
  double r2 = (q != 0.0) ? C / q : -B / A;  // q = 0 only when B = disc = 0
  return std::max(r1, r2);
}

double c_weak(double gamma, double k_p) {
  if (!(gamma >= 0.0)) throw std::domain_error("c_weak: gamma must be >= 0");
  if (!(k_p > 0.0)) throw std::domain_error("c_weak: k_p must be > 0");
  const double rad = 16.0 * sq(gamma * k_p) - 8.0 * gamma * k_p + 16.0 * gamma + 1.0;
  return 0.5 - 2.0 * gamma * k_p + 0.5 * std::sqrt(rad);
}

double EllipseStrong::semi_re() const { return std::sqrt(bound / q_re); }
double EllipseStrong::semi_im() const { return std::sqrt(bound / q_im); }

bool EllipseStrong::contains(double x, double y, double inflate) const {
  return q_re * sq(x) + q_im * sq(y) <= bound * sq(inflate);
}

EllipseStrong ellipse_strong(double tau, double gamma_k) {
  if (!(std::abs(tau) < 1.0)) throw std::domain_error("ellipse_strong: |tau| must be < 1");
  const double omt2 = 1.0 - tau * tau;
  if (!(gamma_k > -1.0 / (2.0 * (1.0 + tau)))) {
    throw std::domain_error("ellipse_strong: gamma_k at or below the pole bound");
  }
  EllipseStrong e;
  e.scale_c = 1.0 / omt2 + 2.0 * gamma_k;
  e.q_re = (1.0 - tau + 2.0 * gamma_k * omt2) / (1.0 + tau + 2.0 * gamma_k * omt2);
  e.q_im = 1.0 / e.q_re;
  e.bound = 1.0 / e.scale_c;
  e.degenerate = (e.semi_im() < 1e-6 * e.semi_re());
  return e;
}

PabCovariance covariance_pab(const ModelParams& p) {
  validate(p);
  const double k = solve_k(p.tau, p.gamma, p.k_p);
  const double gk = p.gamma * k;
  const double omt2 = 1.0 - p.tau * p.tau;
  const double n = double(p.n);
  PabCovariance c;
  c.var_diag_re = (1.0 + p.tau) / (2.0 * n * (1.0 + 2.0 * gk * (1.0 + p.tau)));
  c.var_diag_im = (1.0 - p.tau) / (2.0 * n * (1.0 + 2.0 * gk * (1.0 - p.tau)));
  const double den = 1.0 + 4.0 * gk + 4.0 * sq(gk) * omt2;
  c.var_off = (1.0 + 2.0 * gk * omt2) / (2.0 * n * den);
  c.cov_real = p.tau / (2.0 * n * den);
  c.lambda_plus_sq = c.var_off + c.cov_real;
  c.lambda_minus_sq = c.var_off - c.cov_real;
  c.mean_trace_jj = 2.0 * n * (n - 1.0) * c.var_off + n * (c.var_diag_re + c.var_diag_im);
  if (!(c.var_diag_re > 0.0 && c.var_diag_im > 0.0 && c.var_off > 0.0 &&
        c.lambda_plus_sq > 0.0 && c.lambda_minus_sq > 0.0)) {
    throw std::runtime_error("covariance_pab: non-positive variance in admissible domain");
  }
  return c;
}

DerivedParams derive(const ModelParams& p) {
  validate(p);
  return derive_unchecked(p);
}

DerivedParams derive_unchecked(const ModelParams& p) {
  DerivedParams d;
  d.k = solve_k(p.tau, p.gamma, p.k_p);
  const double omt2 = 1.0 - p.tau * p.tau;
  const double a0 = double(p.n) * (1.0 / omt2 + 2.0 * p.gamma * d.k);
  d.a_t = cd(a0, -p.t);
  d.b = p.tau * double(p.n) / omt2;
  if (!(a0 > std::abs(d.b))) {
    throw std::runtime_error("derive: a(0) <= |b|, measure not normalizable");
  }
  d.c_at_sq = (p.tau != 0.0)
                  ? (d.a_t * d.a_t - sq(d.b)) / (2.0 * d.b)
                  : cd(std::numeric_limits<double>::infinity(), 0.0);
  d.c_weak = rmt::c_weak(p.gamma, p.k_p);
  d.c_kbar = 1.0 + 4.0 * p.gamma * kbar(p.gamma, p.k_p);
  d.ellipse = ellipse_strong(p.tau, p.gamma * d.k);
  if (std::abs(relation_residual(p.tau, p.gamma, p.k_p, d.k)) > 1e-12) {
    throw std::runtime_error("derive: recentering relation residual above 1e-12");
  }
  return d;
}

double WeakScaling::tau_n(int n) const { return 1.0 - alpha * alpha / (2.0 * n * nu * nu); }
double WeakScaling::local_scale(int n) const { return double(n) * nu; }

WeakScaling weak_scaling(double x, double alpha, double c) {
  if (!(alpha > 0.0)) throw std::domain_error("weak_scaling: alpha must be > 0");
  if (!(c > 0.0)) throw std::domain_error("weak_scaling: c must be > 0");
  const double half_width_sq = 4.0 / c - x * x;
  if (!(half_width_sq > 0.0)) {
    throw std::domain_error("weak_scaling: x outside the bulk (|x| >= 2/sqrt(c))");
  }
  WeakScaling w;
  w.x = x;
  w.alpha = alpha;
  w.c = c;
  w.nu = c / (2.0 * M_PI) * std::sqrt(half_width_sq);
  w.alpha_tilde = alpha * c / w.nu;
  return w;
}

}  // namespace rmt
