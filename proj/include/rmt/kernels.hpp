#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rmt/cmatrix.hpp"
#include "rmt/params.hpp"

namespace rmt {

enum class KernelRegime {
  finite_n_sum,
  contour_oracle,
  strong_limit,
  weak_limit,
  weak_prop,
};

const char* to_string(KernelRegime r);

// Evaluation context: the derived weight constants plus regime selection.
// alpha and x_global are meaningful for the weak regimes only.
struct KernelContext {
  ModelParams params;
  DerivedParams derived;
  int n = 1;
  KernelRegime regime = KernelRegime::finite_n_sum;
  double alpha = 0.0;
  double x_global = 0.0;
};
KernelContext make_context(const ModelParams& p, KernelRegime regime,
                           double alpha = 0.0, double x_global = 0.0);

// Weight W(z) = exp(-a(t)|z|^2 + (b/2)(z^2 + conj(z)^2)) in split form:
// |W| through its log, and the unit phase separately (a(t) may be complex).
struct WeightParts {
  double log_magnitude = 0.0;
  cd phase = cd(1.0, 0.0);
};
WeightParts weight_w(cd z, const KernelContext& ctx);

// Finite-n kernel via the scaled planar-Hermite recurrence (monomial branch
// when b = 0). value is the fully recombined kernel; log_scale reports the
// exponent factored through during stabilization as a dynamic-range
// diagnostic, not a factor still owed to value.
struct ScaledKernelValue {
  cd value;
  double log_scale = 0.0;
};
ScaledKernelValue kernel_finite_n_scaled(cd z1, cd z2, const KernelContext& ctx);
cd kernel_finite_n(cd z1, cd z2, const KernelContext& ctx);

// Independent oracle: the double-integral representation, tanh-sinh tensor
// quadrature with a convergence check across refinement levels.
cd kernel_contour(cd z1, cd z2, const KernelContext& ctx);

// Limiting kernels.
cd k_strong(cd z1, cd z2);
cd k_weak(cd z1, cd z2, double alpha);
cd k_weak_prop(double x_global, cd z1, cd z2, double alpha_tilde, double c);

// Correlation determinant det[K(z_i, z_j)] for up to 8 points.
cd rho_det(const std::vector<cd>& points, const std::function<cd(cd, cd)>& kernel);

// |exp(-gamma x^2) - (4 pi gamma)^{-1/2} Int exp(ixt - t^2/(4 gamma)) dt|.
double hubbard_stratonovich_check(double x, double gamma);

// values holds complete kernel values; log_scale mirrors the per-point
// diagnostic exponent (0 for regimes that need no stabilization).
struct KernelProfile {
  std::vector<std::pair<cd, cd>> grid;
  std::vector<cd> values;
  std::vector<double> log_scale;
  KernelRegime provenance = KernelRegime::finite_n_sum;
};
KernelProfile evaluate_profile(const std::vector<std::pair<cd, cd>>& grid,
                               const KernelContext& ctx);
std::string profile_csv(const KernelProfile& p);
std::string profile_json(const KernelProfile& p, const KernelContext& ctx);

}  // namespace rmt
