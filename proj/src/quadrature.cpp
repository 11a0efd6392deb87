#include "rmt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rmt {

namespace {

QuadRule make_gauss_legendre(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double eps = 1e-15;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < eps) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[i] = wi;
    r.w[n - 1 - i] = wi;
  }
  return r;
}

// Orthonormal-Hermite Newton iteration; initial guesses follow the classic
// scheme of stepping inward from the largest root.
QuadRule make_gauss_hermite(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double eps = 1e-14;
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.x[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.x[n - 2];
    } else {
      z = 2.0 * z - r.x[n - i + 1];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < eps) break;
    }
    r.x[n - 1 - i] = z;
    r.x[i] = -z;
    r.w[n - 1 - i] = 2.0 / (pp * pp);
    r.w[i] = r.w[n - 1 - i];
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;  // enforce the exact central node
  return r;
}

std::map<int, QuadRule> gl_cache;
std::map<int, QuadRule> gh_cache;
std::mutex cache_mutex;

}  // namespace

const QuadRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = gl_cache.find(order);
  if (it == gl_cache.end()) it = gl_cache.emplace(order, make_gauss_legendre(order)).first;
  return it->second;
}

const QuadRule& gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = gh_cache.find(order);
  if (it == gh_cache.end()) it = gh_cache.emplace(order, make_gauss_hermite(order)).first;
  return it->second;
}

QuadRule tanh_sinh(int level) {
  if (level < 1 || level > 14) throw std::invalid_argument("tanh_sinh: level out of range");
  QuadRule r;
  const double h = std::ldexp(1.0, -level);
  const double half_pi = M_PI / 2.0;
  for (int k = 0;; ++k) {
    double t = k * h;
    double s = half_pi * std::sinh(t);
    double x = std::tanh(s);
    double w = h * half_pi * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    if (w < 1e-17 || 1.0 - x < 1e-17) break;
    if (k == 0) {
      r.x.push_back(x);
      r.w.push_back(w);
    } else {
      r.x.push_back(x);
      r.w.push_back(w);
      r.x.push_back(-x);
      r.w.push_back(w);
    }
    if (k > 20000) throw std::runtime_error("tanh_sinh: node generation runaway");
  }
  return r;
}

QuadRule gl_panels(double a, double b, int order, int panels) {
  const QuadRule& base = gauss_legendre(order);
  QuadRule r;
  r.x.reserve(size_t(order) * panels);
  r.w.reserve(size_t(order) * panels);
  double dx = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * dx;
    double c = lo + 0.5 * dx, s = 0.5 * dx;
    for (int i = 0; i < order; ++i) {
      r.x.push_back(c + s * base.x[i]);
      r.w.push_back(s * base.w[i]);
    }
  }
  return r;
}

}  // namespace rmt
