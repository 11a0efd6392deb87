#include "rmt/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmt {

namespace {

void require_valid(const ComplexMatrix& m, int max_n) {
  if (m.n < 1) throw std::domain_error("matrix dimension must be >= 1");
  if (m.n > max_n) throw std::domain_error("matrix dimension exceeds supported bound");
  if (m.a.size() != size_t(m.n) * m.n) throw std::domain_error("matrix storage size mismatch");
  for (const cd& v : m.a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::domain_error("matrix entries must be finite");
    }
  }
}

// In-place Householder reduction to upper Hessenberg.
void hessenberg_inplace(ComplexMatrix& h) {
  const int n = h.n;
  std::vector<cd> v(n);
  std::vector<cd> tmp(n);
  for (int k = 0; k + 2 < n; ++k) {
    // Column k below the subdiagonal: x = h[k+1..n-1, k].
    double xnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(h.at(i, k));
    double tail2 = xnorm2 - std::norm(h.at(k + 1, k));
    if (tail2 <= 0.0) continue;  // already Hessenberg in this column
    double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    cd x0 = h.at(k + 1, k);
    cd phase = (x0 == cd(0.0, 0.0)) ? cd(1.0, 0.0) : x0 / std::abs(x0);
    // v = x + phase*|x| e1, normalized; reflection I - 2 v v*.
    double vnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = h.at(i, k);
      if (i == k + 1) v[i] += phase * xnorm;
      vnorm2 += std::norm(v[i]);
    }
    if (vnorm2 == 0.0) continue;
    double inv = 1.0 / std::sqrt(vnorm2);
    for (int i = k + 1; i < n; ++i) v[i] *= inv;
    // Left: H <- H - 2 v (v* H) on rows k+1..n-1.
    for (int j = k; j < n; ++j) {
      cd s(0.0, 0.0);
      for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * h.at(i, j);
      s *= 2.0;
      for (int i = k + 1; i < n; ++i) h.at(i, j) -= s * v[i];
    }
    // Right: H <- H - 2 (H v) v* on columns k+1..n-1.
    for (int i = 0; i < n; ++i) {
      cd s(0.0, 0.0);
      for (int j = k + 1; j < n; ++j) s += h.at(i, j) * v[j];
      s *= 2.0;
      for (int j = k + 1; j < n; ++j) h.at(i, j) -= s * std::conj(v[j]);
    }
    // Entries below the subdiagonal in column k are now zero by construction.
    for (int i = k + 2; i < n; ++i) h.at(i, k) = cd(0.0, 0.0);
  }
}

// Eigenvalue of the trailing 2x2 of block [lo..hi] closest to h(hi,hi).
cd wilkinson_shift(const ComplexMatrix& h, int hi) {
  cd a = h.at(hi - 1, hi - 1), b = h.at(hi - 1, hi);
  cd c = h.at(hi, hi - 1), d = h.at(hi, hi);
  cd s = 0.5 * (a + d);
  cd disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  cd r1 = s + disc, r2 = s - disc;
  return (std::abs(r1 - d) <= std::abs(r2 - d)) ? r1 : r2;
}

}  // namespace

cd trace(const ComplexMatrix& m) {
  cd t(0.0, 0.0);
  for (int i = 0; i < m.n; ++i) t += m.at(i, i);
  return t;
}

double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const cd& v : m.a) s += std::norm(v);
  return std::sqrt(s);
}

ComplexMatrix hessenberg(const ComplexMatrix& m) {
  require_valid(m, 2048);
  ComplexMatrix h = m;
  hessenberg_inplace(h);
  return h;
}

Spectrum eigenvalues(const ComplexMatrix& m) {
  require_valid(m, 2048);
  const int n = m.n;
  ComplexMatrix h = m;
  hessenberg_inplace(h);

  Spectrum out;
  out.values.assign(n, cd(0.0, 0.0));
  if (n == 1) {
    out.values[0] = h.at(0, 0);
    return out;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const long max_sweeps = 30L * n;
  long sweeps = 0;
  int hi = n - 1;
  int stall = 0;

  while (hi >= 0) {
    // Find the active block [lo..hi]: walk up past negligible subdiagonals.
    int lo = hi;
    while (lo > 0) {
      double sub = std::abs(h.at(lo, lo - 1));
      double diag = std::abs(h.at(lo - 1, lo - 1)) + std::abs(h.at(lo, lo));
      if (diag == 0.0) diag = frobenius_norm(h);
      if (sub <= eps * diag) {
        h.at(lo, lo - 1) = cd(0.0, 0.0);
        break;
      }
      --lo;
    }
    if (lo == hi) {  // 1x1 block deflates immediately
      out.values[hi] = h.at(hi, hi);
      --hi;
      stall = 0;
      continue;
    }

    if (sweeps >= max_sweeps) throw EigenConvergenceError(lo, hi);
    ++sweeps;
    ++stall;

    cd mu;
    if (stall % 10 == 0) {
      // Exceptional shift: kick proportional to nearby subdiagonal mass.
      double kick = std::abs(h.at(hi, hi - 1));
      if (hi - 1 > lo) kick += std::abs(h.at(hi - 1, hi - 2));
      mu = h.at(hi, hi) + cd(0.75, 0.35) * kick;
    } else {
      mu = wilkinson_shift(h, hi);
    }

    // Explicit single-shift QR sweep on the block via Givens rotations:
    // H - mu I = Q R, then H <- R Q + mu I.  Rotations touch only the
    // active block (eigenvalues of other blocks are unaffected).
    const int bs = hi - lo + 1;
    std::vector<double> cs(bs - 1);
    std::vector<cd> sn(bs - 1);
    for (int i = lo; i < hi + 1; ++i) h.at(i, i) -= mu;
    for (int k = lo; k < hi; ++k) {
      cd f = h.at(k, k), g = h.at(k + 1, k);
      double af = std::abs(f), ag = std::abs(g);
      double r = std::hypot(af, ag);
      double c;
      cd s;
      if (r == 0.0) {
        c = 1.0;
        s = cd(0.0, 0.0);
      } else if (af == 0.0) {
        c = 0.0;
        s = std::conj(g) / ag;
      } else {
        c = af / r;
        s = (f / af) * (std::conj(g) / r);
      }
      cs[k - lo] = c;
      sn[k - lo] = s;
      for (int j = k; j <= hi; ++j) {
        cd t1 = h.at(k, j), t2 = h.at(k + 1, j);
        h.at(k, j) = c * t1 + s * t2;
        h.at(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (int k = lo; k < hi; ++k) {
      double c = cs[k - lo];
      cd s = sn[k - lo];
      int top = lo;
      for (int i = top; i <= std::min(k + 2, hi); ++i) {
        cd t1 = h.at(i, k), t2 = h.at(i, k + 1);
        h.at(i, k) = c * t1 + std::conj(s) * t2;
        h.at(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (int i = lo; i < hi + 1; ++i) h.at(i, i) += mu;
  }

  std::sort(out.values.begin(), out.values.end(), [](cd x, cd y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

cd det_lu(const ComplexMatrix& m) {
  require_valid(m, 2048);
  ComplexMatrix u = m;
  const int n = u.n;
  cd det(1.0, 0.0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(u.at(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(u.at(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return cd(0.0, 0.0);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(u.at(k, j), u.at(piv, j));
      det = -det;
    }
    det *= u.at(k, k);
    for (int i = k + 1; i < n; ++i) {
      cd f = u.at(i, k) / u.at(k, k);
      for (int j = k; j < n; ++j) u.at(i, j) -= f * u.at(k, j);
    }
  }
  return det;
}

}  // namespace rmt
