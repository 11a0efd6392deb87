#include "rmt/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rmt {

namespace {

bool finite_cd(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Faddeeva function w(zeta) = exp(-zeta^2) erfc(-i zeta) for Im zeta >= 0.
// Two regimes: a sinc-expansion (trapezoid or midpoint nodes, whichever
// family keeps clear of the poles on the real axis) with its exact
// residue correction, and the Laplace continued fraction for large |zeta|.
cd faddeeva_upper(cd zeta) {
  const double abs2 = std::norm(zeta);
  if (abs2 >= 144.0) {
    // w(zeta) = (i/sqrt(pi)) / (zeta - (1/2)/(zeta - 1/(zeta - (3/2)/...)))
    cd f = 0.0;
    for (int k = 48; k >= 1; --k) f = (0.5 * k) / (zeta - f);
    return cd(0.0, 1.0) / std::sqrt(M_PI) / (zeta - f);
  }
  const double h = 0.25;
  const int K = 40;
  double fr = zeta.real() / h;
  bool use_midpoint = std::abs(fr - std::round(fr)) < 0.25;
  cd S = 0.0;
  for (int k = -K; k <= K; ++k) {
    double t = use_midpoint ? (k + 0.5) * h : k * h;
    S += std::exp(-t * t) / (zeta - t);
  }
  cd base = cd(0.0, h / M_PI) * S;
  // Residue correction from the pole crossed by the node contour.
  cd expmz2 = std::exp(-zeta * zeta);
  cd q = std::exp(cd(0.0, -2.0 * M_PI / h) * zeta);
  cd corr = use_midpoint ? 2.0 * expmz2 / (1.0 + q) : 2.0 * expmz2 / (1.0 - q);
  return base + corr;
}

// Lower-gamma power series: P(w,z) = z^w e^{-z}/Gamma(w) * sum_n z^n / ((w)...(w+n)).
// Converges for every finite z; the prefactor is assembled in log space.
cd gamma_p_series(double w, cd z) {
  cd sum = 1.0 / w;
  cd term = sum;
  for (int n = 1; n < 3000; ++n) {
    term *= z / (w + n);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  cd logpre = w * std::log(z) - z - std::lgamma(w);
  return std::exp(logpre) * sum;
}

// Upper-gamma continued fraction (modified Lentz),
// Gamma(w,z) = e^{-z} z^w / (z+1-w - 1(1-w)/(z+3-w - 2(2-w)/(...))).
cd gamma_q_cf(double w, cd z) {
  const double tiny = 1e-290;
  cd b = z + 1.0 - w;
  cd c = 1.0 / tiny;
  cd d = 1.0 / b;
  cd f = d;
  for (int i = 1; i < 20000; ++i) {
    double an = -double(i) * (double(i) - w);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    cd delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  cd logpre = w * std::log(z) - z - std::lgamma(w);
  return std::exp(logpre) * f;
}

// Power series of z - 1 - log z around z = 1 in u = z - 1:
// sum_{n>=2} (-1)^n u^n / n, used where direct subtraction cancels.
cd zlog_diff_series(cd u) {
  cd sum = 0.0;
  cd un = u;  // u^1
  for (int n = 2; n <= 60; ++n) {
    un *= u;
    cd term = un / double(n);
    if (n % 2 == 1) term = -term;
    sum += term;
    if (std::abs(term) < 1e-19 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

cd eta_from_principal(cd z) {
  // Principal square root of 2(z - 1 - log z); caller fixes the sign.
  return std::sqrt(2.0 * (z - 1.0 - std::log(z)));
}

cd eta_near(cd z) {
  // Valid for |z - 1| <= 0.6: g = 2(z-1-log z)/(z-1)^2 stays near 1, so
  // the principal root of g carries the right branch automatically.
  cd u = z - 1.0;
  cd d = (std::abs(u) <= 0.1) ? zlog_diff_series(u) : (u - std::log(z));
  return u * std::sqrt(2.0 * d / (u * u));
}

}  // namespace

cd erfc_complex(cd z) {
  if (!finite_cd(z)) throw std::domain_error("erfc_complex: non-finite argument");
  // Reduce to Re z >= 0 with erfc(-z) = 2 - erfc(z), then to the upper
  // half-plane of zeta = i z by conjugation symmetry.
  if (z.real() < 0.0) return 2.0 - erfc_complex(-z);
  bool conj_flip = z.imag() < 0.0;
  cd zz = conj_flip ? std::conj(z) : z;  // Re >= 0, Im >= 0
  cd zeta = cd(-zz.imag(), zz.real());   // i * zz, Im zeta = Re zz >= 0
  cd wv = faddeeva_upper(zeta);
  // erfc(zz) = exp(-zz^2) w(i zz); assemble in log space so that the
  // representable-but-extreme magnitudes survive.
  cd z2 = zz * zz;
  double lg = -z2.real() + std::log(std::abs(wv) + 1e-320);
  cd phase = std::exp(cd(0.0, -z2.imag())) * (wv / (std::abs(wv) + 1e-320));
  cd res = std::exp(lg) * phase;
  if (zz.imag() == 0.0) res.imag(0.0);  // real arguments map to real values
  return conj_flip ? std::conj(res) : res;
}

cd gamma_q(double w, cd z) {
  if (!(w > 0.0) || !std::isfinite(w)) throw std::domain_error("gamma_q: w must be positive");
  if (!finite_cd(z)) throw std::domain_error("gamma_q: non-finite argument");
  if (z == cd(0.0, 0.0)) return 1.0;
  if (std::abs(z) < w + 1.0 || z.real() < 0.0) {
    return 1.0 - gamma_p_series(w, z);
  }
  return gamma_q_cf(w, z);
}

EtaValue eta_branch(cd z, double arg_guard) {
  if (!finite_cd(z)) throw std::domain_error("eta_branch: non-finite argument");
  EtaValue out;
  out.z = z;
  if (z == cd(0.0, 0.0)) {
    out.eta = cd(-std::numeric_limits<double>::infinity(), 0.0);
    out.at_zero = true;
    return out;
  }
  // Principal arguments satisfy |arg z| <= pi, so the 3*pi/2 - guard sector
  // can only be violated when the caller widens the guard past pi/2.
  if (std::abs(std::arg(z)) > 1.5 * M_PI - arg_guard) {
    throw std::domain_error("eta_branch: argument outside the guarded sector");
  }
  if (z.imag() == 0.0 && z.real() > 0.0) {
    double x = z.real();
    double d = (std::abs(x - 1.0) <= 0.1) ? zlog_diff_series(cd(x - 1.0, 0.0)).real()
                                          : x - 1.0 - std::log(x);
    double s = std::sqrt(std::max(0.0, 2.0 * d));
    out.eta = cd(x >= 1.0 ? s : -s, 0.0);
    return out;
  }
  if (std::abs(z - 1.0) <= 0.6) {
    out.eta = eta_near(z);
    return out;
  }
  // Branch continuation along an arc at radius 1 followed by a radial
  // segment at fixed angle.  This path keeps |path| >= min(1, |z|), so it
  // never grazes the log singularity at the origin; a straight segment from
  // 1 can pass arbitrarily close to it (e.g. z near the negative real axis).
  // Points of the path inside the near region take the closed form directly;
  // outside it the principal-root sign is fixed by continuity.
  double theta_t = std::arg(z);
  double lr = std::log(std::abs(z));
  double th0 = std::clamp(theta_t, -0.25, 0.25);
  cd eta_prev = eta_near(std::polar(1.0, th0));
  auto walk = [&eta_prev](double total, auto point_at) {
    double s = 0.0, step = 0.02;
    int guard = 0;
    while (s < total) {
      if (++guard > 200000) throw std::runtime_error("eta_branch: tracker failed to advance");
      double sn = std::min(s + step, total);
      cd p = point_at(sn);
      if (std::abs(p - 1.0) <= 0.55) {
        eta_prev = eta_near(p);
        s = sn;
        continue;
      }
      cd root = eta_from_principal(p);
      cd pick = (std::abs(root - eta_prev) <= std::abs(-root - eta_prev)) ? root : -root;
      if (std::abs(pick - eta_prev) > 0.3 * std::max(0.5, std::abs(eta_prev))) {
        step *= 0.5;
        if (step < 1e-9) throw std::runtime_error("eta_branch: branch tracking stalled");
        continue;
      }
      eta_prev = pick;
      s = sn;
      step = std::min(step * 1.9, 0.02);
    }
  };
  double arc_dir = (theta_t >= th0) ? 1.0 : -1.0;
  walk(std::abs(theta_t - th0),
       [&](double s) { return std::polar(1.0, th0 + arc_dir * s); });
  double rad_dir = (lr >= 0.0) ? 1.0 : -1.0;
  walk(std::abs(lr),
       [&](double s) { return std::polar(std::exp(rad_dir * s), theta_t); });
  out.eta = eta_prev;
  return out;
}

cd gamma_q_uniform(double w, cd z, double arg_guard) {
  if (!(w >= 10.0)) throw std::domain_error("gamma_q_uniform: w must be >= 10");
  if (!finite_cd(z)) throw std::domain_error("gamma_q_uniform: non-finite argument");
  EtaValue ev = eta_branch(z, arg_guard);
  if (ev.at_zero) return 1.0;
  return 0.5 * erfc_complex(ev.eta * std::sqrt(w / 2.0));
}

cd hermite_h(int k, cd z) {
  if (k < 0) throw std::domain_error("hermite_h: negative degree");
  if (k > 500) throw std::overflow_error("hermite_h: degree > 500; use the scaled kernel recurrence");
  cd hm = 1.0;
  if (k == 0) return hm;
  cd h = 2.0 * z;
  for (int j = 1; j < k; ++j) {
    cd hn = 2.0 * z * h - 2.0 * double(j) * hm;
    hm = h;
    h = hn;
    if (!finite_cd(h) || std::abs(h) > 1e300) {
      throw std::overflow_error("hermite_h: overflow; use the scaled kernel recurrence");
    }
  }
  return h;
}

}  // namespace rmt
