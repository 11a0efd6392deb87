#pragma once
#include <complex>

namespace rmt {

using cd = std::complex<double>;

// Default guard band (radians) kept between arg z and the branch cut
// for the eta/uniform-gamma domain checks.
inline constexpr double kDefaultArgGuard = M_PI / 100.0;

// Complementary error function for complex argument,
// erfc(z) = 2/sqrt(pi) * int_z^inf exp(-t^2) dt.
// Target relative accuracy ~1e-13 wherever the value is representable
// in double precision. Throws std::domain_error on non-finite input.
cd erfc_complex(cd z);

// Normalized upper incomplete gamma Q(w, z) = Gamma(w, z)/Gamma(w),
// w > 0 real, z complex (principal branch of z^w away from the positive
// real axis; the power-series continuation is used for Re z < 0).
// Throws std::domain_error for w <= 0 or non-finite z.
cd gamma_q(double w, cd z);

// eta(z) = sqrt(2 (z - 1 - log z)) on the branch that is real with the
// sign of z - 1 on the positive real axis and continuous in the cut plane.
struct EtaValue {
  cd z;
  cd eta;
  bool at_zero = false;  // z == 0 limit: eta -> -inf, Q-limit 1
};
EtaValue eta_branch(cd z, double arg_guard = kDefaultArgGuard);

// Leading uniform asymptotic approximation to Q(w, w*z):
// gamma_q_uniform(w, z) = erfc(eta(z) sqrt(w/2)) / 2.
// Requires w >= 10 and z inside the guarded sector.
cd gamma_q_uniform(double w, cd z, double arg_guard = kDefaultArgGuard);

// Physicists' Hermite polynomial H_k(z) by the three-term recurrence
// H_{k+1} = 2 z H_k - 2 k H_{k-1}. k <= 500; values that overflow the
// double range throw std::overflow_error (use the scaled kernel
// recurrence for large-degree weighted evaluations instead).
cd hermite_h(int k, cd z);

}  // namespace rmt
