#include "rmt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rmt/quadrature.hpp"
#include "rmt/specfun.hpp"

namespace rmt {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite_cd(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Truncated exponential sum Q(n, w) = e^{-w} sum_{j<n} w^j/j!.
cd q_trunc(int n, cd w) {
  cd s(1.0, 0.0), term(1.0, 0.0);
  for (int j = 1; j < n; ++j) {
    term *= w / double(j);
    s += term;
  }
  return std::exp(-w) * s;
}

ScaledKernelValue finite_hermite(cd z1, cd z2, cd a, double b, int n) {
  cd c = std::sqrt((a * a - b * b) / (2.0 * b));
  cd w1 = c * z1;
  cd w2 = c * std::conj(z2);
  cd log_w1 = -a * std::norm(z1) + b * (z1 * z1).real();
  cd log_w2 = -a * std::norm(z2) + b * (z2 * z2).real();
  cd logpref = 0.5 * std::log(a * a - b * b) - std::log(kPi);
  cd logr = std::log(b / (2.0 * a));

  cd s(0.0, 0.0);
  double big_m = -1e300;
  cd h_prev(0.0, 0.0), h(1.0, 0.0);
  cd g_prev(0.0, 0.0), g(1.0, 0.0);
  double e1 = 0.0, e2 = 0.0;
  const double kLim = 1e100;
  const double kLogLim = std::log(kLim);
  for (int j = 0; j < n; ++j) {
    cd lj = logpref + double(j) * logr - std::lgamma(double(j) + 1.0) + e1 + e2;
    cd t = h * g;
    if (t != cd(0.0, 0.0)) {
      double re = lj.real();
      if (re > big_m) {
        s *= (big_m > -1e299) ? std::exp(big_m - re) : 0.0;
        big_m = re;
      }
      s += t * std::exp(lj - big_m);
    }
    cd hn = 2.0 * w1 * h - 2.0 * double(j) * h_prev;
    h_prev = h;
    h = hn;
    cd gn = 2.0 * w2 * g - 2.0 * double(j) * g_prev;
    g_prev = g;
    g = gn;
    if (std::max({std::abs(h.real()), std::abs(h.imag()), std::abs(h_prev.real()),
                  std::abs(h_prev.imag())}) > kLim) {
      h /= kLim;
      h_prev /= kLim;
      e1 += kLogLim;
    }
    if (std::max({std::abs(g.real()), std::abs(g.imag()), std::abs(g_prev.real()),
                  std::abs(g_prev.imag())}) > kLim) {
      g /= kLim;
      g_prev /= kLim;
      e2 += kLogLim;
    }
  }
  cd tail = 0.5 * (log_w1 + log_w2);
  ScaledKernelValue out;
  out.log_scale = big_m + tail.real();
  out.value = s * std::exp(cd(big_m, 0.0) + tail);
  if (!finite_cd(out.value))
    throw std::runtime_error("kernel_finite_n: stabilized sum overflowed");
  return out;
}

ScaledKernelValue finite_monomial(cd z1, cd z2, cd a, int n) {
  cd w = a * z1 * std::conj(z2);
  cd expo = -a * (std::norm(z1) + std::norm(z2)) / 2.0 + w;
  cd q = gamma_q(double(n), w);
  ScaledKernelValue out;
  out.log_scale = expo.real();
  out.value = (a / kPi) * std::exp(expo) * q;
  if (!finite_cd(out.value))
    throw std::runtime_error("kernel_finite_n: monomial branch overflowed");
  return out;
}

// One u-integral of the weak-regime kernels by composite Gauss-Legendre with
// a refinement (halved panels) agreement check.
cd certified_line_integral(const std::function<cd(double)>& f, double lo, double hi,
                           int panels) {
  auto eval = [&](int np) {
    const QuadRule& r = gl_panels(lo, hi, 24, np);
    cd s(0.0, 0.0);
    for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
    return s;
  };
  cd coarse = eval(panels);
  cd fine = eval(2 * panels);
  double scale = std::max(1.0, std::abs(fine));
  if (std::abs(fine - coarse) > 1e-10 * scale)
    throw std::runtime_error("weak kernel quadrature failed to certify");
  return fine;
}

}  // namespace

const char* to_string(KernelRegime r) {
  switch (r) {
    case KernelRegime::finite_n_sum: return "finite_n_sum";
    case KernelRegime::contour_oracle: return "contour_oracle";
    case KernelRegime::strong_limit: return "strong_limit";
    case KernelRegime::weak_limit: return "weak_limit";
    case KernelRegime::weak_prop: return "weak_prop";
  }
  return "unknown";
}

KernelContext make_context(const ModelParams& p, KernelRegime regime, double alpha,
                           double x_global) {
  // Kernel contexts admit n = 1 (single-term sum); the ensemble-facing
  // ModelParams contract starts at n = 2, so validate on a lifted copy.
  if (p.n < 1) throw std::domain_error("make_context: n must be >= 1");
  ModelParams lifted = p;
  lifted.n = std::max(p.n, 2);
  validate(lifted);
  double t_cap = 10.0 * std::sqrt(std::log(std::max(p.n, 2)));
  if (std::abs(p.t) > t_cap)
    throw std::domain_error("make_context: |t| outside the validity window");
  bool weak = regime == KernelRegime::weak_limit || regime == KernelRegime::weak_prop;
  if (weak && !(alpha > 0.0))
    throw std::domain_error("make_context: weak regimes need alpha > 0");
  KernelContext ctx;
  ctx.params = p;
  ctx.derived = derive_unchecked(p);
  ctx.n = p.n;
  ctx.regime = regime;
  ctx.alpha = alpha;
  ctx.x_global = x_global;
  return ctx;
}

WeightParts weight_w(cd z, const KernelContext& ctx) {
  cd log_w = -ctx.derived.a_t * std::norm(z) + ctx.derived.b * (z * z).real();
  WeightParts out;
  out.log_magnitude = log_w.real();
  out.phase = std::exp(cd(0.0, log_w.imag()));
  return out;
}

ScaledKernelValue kernel_finite_n_scaled(cd z1, cd z2, const KernelContext& ctx) {
  if (ctx.derived.b == 0.0) return finite_monomial(z1, z2, ctx.derived.a_t, ctx.n);
  return finite_hermite(z1, z2, ctx.derived.a_t, ctx.derived.b, ctx.n);
}

cd kernel_finite_n(cd z1, cd z2, const KernelContext& ctx) {
  return kernel_finite_n_scaled(z1, z2, ctx).value;
}

cd kernel_contour(cd z1, cd z2, const KernelContext& ctx) {
  cd a = ctx.derived.a_t;
  double b = ctx.derived.b;
  if (b == 0.0) throw std::domain_error("kernel_contour: requires b != 0");
  if (ctx.n > 100) throw std::domain_error("kernel_contour: oracle regime is n <= 100");
  int n = ctx.n;
  cd zb2 = std::conj(z2);
  cd A = (a - b) / (2.0 * a);
  cd B = (a + b) / (2.0 * a);
  cd c = std::sqrt((a * a - b * b) / (2.0 * b));
  cd x0 = cd(0.0, 1.0) * (z1 - zb2) / (1.0 - b / a) * c;
  cd y0 = cd(0.0, 1.0) * (z1 + zb2) / (1.0 + b / a) * c;
  cd e = -(a / 2.0) * (std::norm(z1) + std::norm(z2)) +
         cd(0.0, b / 2.0) * ((z2 * z2).imag() - (z1 * z1).imag()) + a * z1 * zb2;
  cd beta = b / (2.0 * a);

  // Integrate along the shifted lines x0 + R and y0 + R: the integrand is
  // entire with Gaussian decay, so the contour shift is exact and removes
  // the exp(Re A Im(x0)^2) magnitude boost of the real-line parameterization.
  // Truncate where the envelope drops below 1e-16 of its peak: the Q factor
  // carries exp(+-Re(beta) u^2) which cancels against the Gaussians down to
  // the exact rate Re(A + beta) = Re(B - beta) = 1/2, plus a u^{2n}
  // polynomial envelope; solve for the cutoff by fixed point.
  double trunc = 10.0;
  for (int it = 0; it < 4; ++it)
    trunc = std::sqrt(2.0 * (37.0 + 2.0 * n * std::log(std::max(trunc, 2.0))));

  auto eval = [&](int level) {
    QuadRule r = tanh_sinh(level);
    size_t m = r.x.size();
    std::vector<cd> gx(m), gy(m), xs(m), ys(m);
    for (size_t i = 0; i < m; ++i) {
      double s = trunc * r.x[i];
      xs[i] = x0 + s;
      ys[i] = y0 + s;
      gx[i] = std::exp(-A * s * s);
      gy[i] = std::exp(-B * s * s);
    }
    cd total(0.0, 0.0);
    for (size_t i = 0; i < m; ++i) {
      cd row(0.0, 0.0);
      for (size_t j = 0; j < m; ++j)
        row += r.w[j] * gy[j] * q_trunc(n, beta * (xs[i] * xs[i] - ys[j] * ys[j]));
      total += r.w[i] * gx[i] * row;
    }
    return total * trunc * trunc;
  };
  cd pref = std::sqrt(a * a - b * b) / (2.0 * kPi * kPi) * std::exp(e);
  cd prev = eval(6);
  for (int level = 7; level <= 9; ++level) {
    cd cur = eval(level);
    if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), 1e-30))
      return pref * cur;
    prev = cur;
  }
  throw std::runtime_error("kernel_contour: quadrature failed to converge");
}

cd k_strong(cd z1, cd z2) {
  return std::exp(-(std::norm(z1) + std::norm(z2)) / 2.0 + z1 * std::conj(z2)) / kPi;
}

cd k_weak(cd z1, cd z2, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("k_weak: alpha must be positive");
  double y1 = z1.imag(), y2 = z2.imag();
  cd d = z1 - std::conj(z2);
  int panels = std::min(2000, 8 + int(3.0 * alpha) + int(3.0 * std::abs(d)));
  cd integral = certified_line_integral(
      [&](double u) { return std::exp(cd(-alpha * alpha * u * u / 2.0, 0.0) +
                                      cd(0.0, u) * d); },
      -kPi, kPi, panels);
  double pref = std::sqrt(2.0) / (std::sqrt(kPi) * alpha) *
                std::exp(-(y1 * y1 + y2 * y2) / (alpha * alpha));
  return pref * integral / (2.0 * kPi);
}

cd k_weak_prop(double x_global, cd z1, cd z2, double alpha_tilde, double c) {
  if (!(alpha_tilde > 0.0) || !(c > 0.0))
    throw std::domain_error("k_weak_prop: alpha_tilde and c must be positive");
  double edge = 4.0 / c - x_global * x_global;
  if (!(edge > 0.0))
    throw std::domain_error("k_weak_prop: |x_global| must lie inside 2/sqrt(c)");
  double l = 0.5 * std::sqrt(edge);
  double x1 = z1.real(), x2 = z2.real();
  double y1 = z1.imag(), y2 = z2.imag();
  int panels = std::min(2000, 8 + int(3.0 * alpha_tilde * l) +
                                  int(3.0 * (std::abs(x1 - x2) + std::abs(y1 + y2))));
  cd integral = certified_line_integral(
      [&](double u) {
        return std::exp(cd(-alpha_tilde * alpha_tilde * u * u / 2.0 - u * (y1 + y2),
                           u * (x1 - x2)));
      },
      -l, l, panels);
  cd pref = (1.0 / kPi) * std::exp(cd(-(y1 * y1 + y2 * y2) /
                                          (alpha_tilde * alpha_tilde),
                                      x_global * (y1 - y2) / 2.0));
  return pref * integral / (std::sqrt(2.0 * kPi) * alpha_tilde);
}

cd rho_det(const std::vector<cd>& points, const std::function<cd(cd, cd)>& kernel) {
  size_t k = points.size();
  if (k < 1 || k > 8) throw std::domain_error("rho_det: needs 1..8 points");
  ComplexMatrix m{int(k)};
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) m.at(int(i), int(j)) = kernel(points[i], points[j]);
  return det_lu(m);
}

double hubbard_stratonovich_check(double x, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("hubbard_stratonovich_check: gamma > 0");
  double t_max = std::sqrt(4.0 * gamma * 42.0);
  double sigma = std::sqrt(2.0 * gamma);
  double osc = 1.0 / (0.5 + std::abs(x) / 4.0);
  double width = std::min(sigma, osc);
  int panels = std::min(4000, int(2.0 * t_max / width) + 8);
  const QuadRule& r = gl_panels(-t_max, t_max, 32, panels);
  cd s(0.0, 0.0);
  for (size_t i = 0; i < r.x.size(); ++i) {
    double t = r.x[i];
    s += r.w[i] * std::exp(cd(-t * t / (4.0 * gamma), x * t));
  }
  s /= std::sqrt(4.0 * kPi * gamma);
  return std::abs(std::exp(-gamma * x * x) - s);
}

KernelProfile evaluate_profile(const std::vector<std::pair<cd, cd>>& grid,
                               const KernelContext& ctx) {
  KernelProfile p;
  p.grid = grid;
  p.provenance = ctx.regime;
  p.values.reserve(grid.size());
  p.log_scale.reserve(grid.size());
  for (const auto& [z1, z2] : grid) {
    switch (ctx.regime) {
      case KernelRegime::finite_n_sum: {
        ScaledKernelValue v = kernel_finite_n_scaled(z1, z2, ctx);
        p.values.push_back(v.value);
        p.log_scale.push_back(v.log_scale);
        break;
      }
      case KernelRegime::contour_oracle:
        p.values.push_back(kernel_contour(z1, z2, ctx));
        p.log_scale.push_back(0.0);
        break;
      case KernelRegime::strong_limit:
        p.values.push_back(k_strong(z1, z2));
        p.log_scale.push_back(0.0);
        break;
      case KernelRegime::weak_limit:
        p.values.push_back(k_weak(z1, z2, ctx.alpha));
        p.log_scale.push_back(0.0);
        break;
      case KernelRegime::weak_prop:
        p.values.push_back(
            k_weak_prop(ctx.x_global, z1, z2, ctx.alpha, ctx.derived.c_weak));
        p.log_scale.push_back(0.0);
        break;
    }
    if (!finite_cd(p.values.back()))
      throw std::runtime_error("evaluate_profile: non-finite kernel value");
  }
  return p;
}

std::string profile_csv(const KernelProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "re1,im1,re2,im2,re_val,im_val,log_scale\n";
  for (size_t i = 0; i < p.grid.size(); ++i) {
    const auto& [z1, z2] = p.grid[i];
    os << z1.real() << ',' << z1.imag() << ',' << z2.real() << ',' << z2.imag()
       << ',' << p.values[i].real() << ',' << p.values[i].imag() << ','
       << p.log_scale[i] << '\n';
  }
  return os.str();
}

std::string profile_json(const KernelProfile& p, const KernelContext& ctx) {
  nlohmann::json j;
  j["regime"] = to_string(p.provenance);
  j["context"] = {{"tau", ctx.params.tau}, {"gamma", ctx.params.gamma},
                  {"k_p", ctx.params.k_p}, {"n", ctx.n},
                  {"t", ctx.params.t},     {"alpha", ctx.alpha},
                  {"x_global", ctx.x_global}};
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < p.grid.size(); ++i) {
    rows.push_back({{"z1", {p.grid[i].first.real(), p.grid[i].first.imag()}},
                    {"z2", {p.grid[i].second.real(), p.grid[i].second.imag()}},
                    {"value", {p.values[i].real(), p.values[i].imag()}},
                    {"log_scale", p.log_scale[i]}});
  }
  j["points"] = rows;
  return j.dump(2);
}

}  // namespace rmt
