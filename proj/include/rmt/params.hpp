#pragma once

#include <complex>

namespace rmt {

using cd = std::complex<double>;

// Model inputs: asymmetry tau in (-1,1), confinement strength gamma >= 0,
// trace target k_p > 0, matrix size n >= 2, linearization frequency t (real).
struct ModelParams {
  double tau = 0.0;
  double gamma = 0.0;
  double k_p = 1.0;
  int n = 2;
  double t = 0.0;
};

void validate(const ModelParams& p);  // throws std::domain_error

// Recentering constant K: rightmost real root of the defining cubic,
// exceeding max{-(2 gamma (1-tau))^{-1}, -(2 gamma (1+tau))^{-1}}.
// gamma = 0 returns 1 - k_p exactly.
double solve_k(double tau, double gamma, double k_p);

// tau -> 1 limit of K in closed form; gamma = 0 returns 1 - k_p.
double kbar(double gamma, double k_p);

// gamma -> infinity limit of the product gamma*K: rightmost root of the
// fixed-trace quadratic, exceeding the corresponding pole bound.
double k_ft(double tau, double k_p);

// Weak-regime density constant C = 1/2 - 2 gamma k_p
//   + (1/2) sqrt(16 gamma^2 k_p^2 - 8 gamma k_p + 16 gamma + 1); always > 0.
double c_weak(double gamma, double k_p);

// Limiting-support ellipse q_re x^2 + q_im y^2 <= bound, with the density
// scale C = scale_c = 1/(1-tau^2) + 2*gamma_k.  Parameterized by the product
// gamma_k = gamma*K so the fixed-trace limit plugs in k_ft directly.
struct EllipseStrong {
  double q_re = 1.0;
  double q_im = 1.0;
  double bound = 1.0;
  double scale_c = 1.0;
  bool degenerate = false;  // semi-minor axis collapsed (|tau| -> 1)

  double semi_re() const;
  double semi_im() const;
  bool contains(double x, double y, double inflate = 1.0) const;
};
EllipseStrong ellipse_strong(double tau, double gamma_k);

// Entry covariances of the Gaussian measure P_{a,b}:
// diagonal real/imaginary variances, off-diagonal variance sigma_O^2,
// the opposite-entry real covariance rho, and the symmetrized/antisymmetrized
// variances lambda_pm^2 = sigma_O^2 +- rho.  mean_trace_jj is the exact
// E[Tr JJ*] = 2N(N-1) sigma_O^2 + N (var_diag_re + var_diag_im).
struct PabCovariance {
  double var_diag_re = 0.0;
  double var_diag_im = 0.0;
  double var_off = 0.0;
  double cov_real = 0.0;
  double lambda_plus_sq = 0.0;
  double lambda_minus_sq = 0.0;
  double mean_trace_jj = 0.0;
};
PabCovariance covariance_pab(const ModelParams& p);

// All closed-form constants derived from one parameter tuple.
struct DerivedParams {
  double k = 0.0;        // recentering constant
  cd a_t;                // N(1/(1-tau^2) + 2 gamma K) - i t
  double b = 0.0;        // tau N/(1-tau^2)
  cd c_at_sq;            // (a_t^2 - b^2)/(2b); +inf at tau = 0
  double c_weak = 1.0;   // weak-regime constant C
  double c_kbar = 1.0;   // 1 + 4 gamma kbar
  EllipseStrong ellipse; // strong-regime support
};
DerivedParams derive(const ModelParams& p);

// derive without the ModelParams validation gate, for callers that admit
// n = 1 (kernel contexts); all other fields must still be in domain.
DerivedParams derive_unchecked(const ModelParams& p);

// Bulk scalings of the weak-non-Hermiticity regime at a spectral point x:
// density nu(x) = (C/2pi) sqrt(4/C - x^2), the size-dependent asymmetry
// tau_n = 1 - alpha^2/(2 n nu^2), the local scale n*nu, and the rescaled
// parameter alpha_tilde = alpha C/nu.
struct WeakScaling {
  double x = 0.0;
  double alpha = 1.0;
  double c = 1.0;
  double nu = 0.0;
  double alpha_tilde = 0.0;

  double tau_n(int n) const;
  double local_scale(int n) const;
};
WeakScaling weak_scaling(double x, double alpha, double c);

}  // namespace rmt
