#include "rmt/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rmt/cmatrix.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/kernels.hpp"
#include "rmt/params.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/rng.hpp"
#include "rmt/specfun.hpp"
#include "rmt/stats.hpp"

namespace rmt {

namespace {

// Index-addressed parallel loop; results must be written to per-index slots
// so the outcome is independent of scheduling. First worker exception wins.
void parallel_for(long total, int threads, const std::function<void(long)>& body) {
  long nw = std::max<long>(1, std::min<long>(threads, total));
  if (nw == 1) {
    for (long i = 0; i < total; ++i) body(i);
    return;
  }
  std::atomic<long> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (long t = 0; t < nw; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        long i = cursor.fetch_add(1);
        if (i >= total) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<SpectrumSample> collect_draws(
    long draws, int threads,
    const std::function<SpectrumSample(long)>& one_draw) {
  auto out = std::vector<SpectrumSample>(size_t(draws));
  parallel_for(draws, threads, [&](long d) { out[size_t(d)] = one_draw(d); });
  return out;
}

// measured must be <= bound.
void check_le(CriterionResult& r, const std::string& label, double measured,
              double bound) {
  r.checks.push_back({label + " <=", measured, bound, measured <= bound});
}

// measured must be >= bound.
void check_ge(CriterionResult& r, const std::string& label, double measured,
              double bound) {
  r.checks.push_back({label + " >=", measured, bound, measured >= bound});
}

std::vector<double> linspace_edges(double lo, double hi, int bins) {
  std::vector<double> e(size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i) e[size_t(i)] = lo + (hi - lo) * i / bins;
  return e;
}

ModelParams params_of(double tau, double gamma, double k_p, int n, double t = 0.0) {
  ModelParams p;
  p.tau = tau;
  p.gamma = gamma;
  p.k_p = k_p;
  p.n = n;
  p.t = t;
  return p;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

struct VarStats {
  double var, se;
};
// Sample variance with the fourth-moment standard error of that estimate.
VarStats var_stats(const std::vector<double>& x) {
  double mu = mean_of(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - mu;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  double n = double(x.size());
  m2 /= n;
  m4 /= n;
  return {m2 * n / (n - 1.0), std::sqrt((m4 - m2 * m2) / n)};
}

struct CovStats {
  double cov, se;
};
CovStats cov_stats(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = mean_of(x), my = mean_of(y);
  std::vector<double> p(x.size());
  for (size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my);
  double cov = mean_of(p);
  double sd = 0.0;
  for (double v : p) sd += (v - cov) * (v - cov);
  sd = std::sqrt(sd / double(p.size() - 1));
  return {cov, sd / std::sqrt(double(p.size()))};
}

cd bulk_point(RngStream& rng, double half_re, double half_im) {
  return cd(half_re * (2.0 * rng.uniform01() - 1.0),
            half_im * (2.0 * rng.uniform01() - 1.0));
}

// ---- criterion bodies -------------------------------------------------

// Planar Hermite orthogonality at (a, b) = (3, 1), degrees through 8.
void c01_orthonormality(CriterionResult& r, uint64_t, int) {
  const double a = 3.0, b = 1.0;
  const double c = std::sqrt((a * a - b * b) / (2.0 * b));
  const int kmax = 8;
  const double sx = 1.0 / std::sqrt(a - b), sy = 1.0 / std::sqrt(a + b);
  const QuadRule& gh = gauss_hermite(48);
  std::vector<std::vector<cd>> gram(kmax + 1, std::vector<cd>(kmax + 1, cd(0, 0)));
  for (size_t i = 0; i < gh.x.size(); ++i) {
    double x = sx * gh.x[i];
    for (size_t j = 0; j < gh.x.size(); ++j) {
      double y = sy * gh.x[j];
      cd z(x, y);
      double wq = gh.w[i] * gh.w[j] * sx * sy;
      std::vector<cd> h(kmax + 1);
      h[0] = 1.0;
      h[1] = 2.0 * c * z;
      for (int k = 1; k < kmax; ++k)
        h[k + 1] = 2.0 * (c * z) * h[k] - 2.0 * double(k) * h[k - 1];
      for (int l = 0; l <= kmax; ++l)
        for (int k = 0; k <= kmax; ++k) gram[l][k] += wq * h[l] * std::conj(h[k]);
    }
  }
  auto norm_k = [&](int k) {
    return std::tgamma(k + 1.0) * M_PI * std::pow(2.0 * a, k) /
           (std::sqrt(a * a - b * b) * std::pow(b, k));
  };
  double diag = 0.0, off = 0.0;
  for (int l = 0; l <= kmax; ++l) {
    for (int k = 0; k <= kmax; ++k) {
      if (l == k)
        diag = std::max(diag, std::abs(gram[l][k].real() - norm_k(k)) / norm_k(k));
      else
        off = std::max(off,
                       std::abs(gram[l][k]) / std::sqrt(norm_k(l) * norm_k(k)));
    }
  }
  check_le(r, "max diagonal relative error", diag, 1e-6);
  check_le(r, "max off-diagonal normalized magnitude", off, 1e-6);
}

// Uniform large-w approximation error against the 0.05 e^{-w eta^2/2}/sqrt(w)
// envelope, plus the required decay when w quadruples.
void c02_uniform_gamma(CriterionResult& r, uint64_t, int) {
  const std::vector<double> ws = {50.0, 200.0, 800.0};
  const std::vector<cd> zs = {cd(0.5, 0.0), cd(0.8, 0.0), cd(1.2, 0.0),
                              cd(2.0, 0.0), cd(1.0, 0.5)};
  std::vector<std::vector<double>> err(ws.size(), std::vector<double>(zs.size()));
  for (size_t wi = 0; wi < ws.size(); ++wi) {
    for (size_t zi = 0; zi < zs.size(); ++zi) {
      double w = ws[wi];
      cd z = zs[zi];
      double e = std::abs(gamma_q(w, w * z) - gamma_q_uniform(w, z));
      err[wi][zi] = e;
      cd eta = eta_branch(z).eta;
      double env =
          0.05 * std::exp(-0.5 * w * (eta * eta).real()) / std::sqrt(w);
      char label[96];
      std::snprintf(label, sizeof label, "error at w=%g z=(%g,%g)", w, z.real(),
                    z.imag());
      check_le(r, label, e, env);
    }
  }
  for (size_t wi = 0; wi + 1 < ws.size(); ++wi) {
    for (size_t zi = 0; zi < zs.size(); ++zi) {
      char label[96];
      std::snprintf(label, sizeof label, "error decay w=%g->%g z=(%g,%g)",
                    ws[wi], ws[wi + 1], zs[zi].real(), zs[zi].imag());
      check_le(r, label, err[wi + 1][zi], 0.6 * err[wi][zi]);
    }
  }
}

// Finite sum versus contour oracle at n = 20 on five bulk pairs.
void c03_kernel_equivalence(CriterionResult& r, uint64_t seed, int) {
  RngStream rng(seed, 903);
  std::vector<std::pair<cd, cd>> pairs;
  for (int i = 0; i < 5; ++i) {
    cd z1 = bulk_point(rng, 0.9, 0.3);
    pairs.emplace_back(z1, z1 + bulk_point(rng, 0.35, 0.2));
  }
  for (double t : {0.0, 3.0}) {
    ModelParams p = params_of(0.5, 0.0, 1.0, 20, t);
    KernelContext fx = make_context(p, KernelRegime::finite_n_sum);
    KernelContext cx = make_context(p, KernelRegime::contour_oracle);
    double worst = 0.0;
    for (const auto& pr : pairs) {
      cd sum = kernel_finite_n(pr.first, pr.second, fx);
      cd ora = kernel_contour(pr.first, pr.second, cx);
      worst = std::max(worst, std::abs(sum - ora) / std::abs(sum));
    }
    char label[64];
    std::snprintf(label, sizeof label, "max relative difference at t=%g", t);
    check_le(r, label, worst, t == 0.0 ? 1e-6 : 1e-5);
  }
}

// Spectral support and bulk flatness of the elliptic ensemble.
void c04_elliptic_law(CriterionResult& r, uint64_t seed, int threads) {
  const int n = 256, draws = 50;
  const double tau = 0.5;
  auto samples = collect_draws(draws, threads, [&](long d) {
    return spectrum_of(sample_elliptic(n, tau, seed, uint64_t(d)),
                       EnsembleTag::elliptic, seed);
  });
  EllipseStrong ell = ellipse_strong(tau, 0.0);
  long inside = 0, total = 0;
  // 0.2-squares over the bounding box; a bin is interior when all four
  // corners sit inside the 0.8-shrunk ellipse.
  const int nx = 15, ny = 5;
  std::vector<long> cell(size_t(nx) * ny, 0);
  for (const auto& s : samples) {
    for (cd z : s.eigenvalues) {
      ++total;
      if (ell.contains(z.real(), z.imag(), 1.03)) ++inside;
      int ix = int(std::floor((z.real() + 1.5) / 0.2));
      int iy = int(std::floor((z.imag() + 0.5) / 0.2));
      if (ix >= 0 && ix < nx && iy >= 0 && iy < ny)
        ++cell[size_t(ix) * ny + iy];
    }
  }
  check_ge(r, "fraction inside 1.03-inflated ellipse", double(inside) / total,
           0.99);
  std::vector<double> interior;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      double x0 = -1.5 + 0.2 * ix, y0 = -0.5 + 0.2 * iy;
      bool in = true;
      for (double x : {x0, x0 + 0.2})
        for (double y : {y0, y0 + 0.2})
          if (!ell.contains(x, y, 0.8)) in = false;
      if (in) interior.push_back(double(cell[size_t(ix) * ny + iy]));
    }
  }
  double mu = mean_of(interior), sd = 0.0;
  for (double v : interior) sd += (v - mu) * (v - mu);
  sd = std::sqrt(sd / double(interior.size() - 1));
  check_le(r, "interior bin density CV", sd / mu, 0.1);
}

// Fixed-trace disk: containment and interior density level.
void c05_ft_disk(CriterionResult& r, uint64_t seed, int threads) {
  const int n = 256, draws = 50;
  const double k_p = 2.0;
  const double radius = std::sqrt(k_p);
  auto samples = collect_draws(draws, threads, [&](long d) {
    return spectrum_of(sample_ft_ginibre(n, k_p, seed, uint64_t(d)),
                       EnsembleTag::ft_ginibre, seed);
  });
  const int nb = 12;
  const double lo = -1.5, w = 0.25;
  const double ref = 1.0 / (2.0 * M_PI);  // C/pi with C = 1/k_p
  long inside = 0, total = 0;
  std::vector<std::vector<double>> dens(
      size_t(draws), std::vector<double>(size_t(nb) * nb, 0.0));
  for (size_t d = 0; d < samples.size(); ++d) {
    for (cd z : samples[d].eigenvalues) {
      ++total;
      if (std::abs(z) <= 1.03 * radius) ++inside;
      int ix = int(std::floor((z.real() - lo) / w));
      int iy = int(std::floor((z.imag() - lo) / w));
      if (ix >= 0 && ix < nb && iy >= 0 && iy < nb)
        dens[d][size_t(ix) * nb + iy] += 1.0 / (n * w * w);
    }
  }
  check_ge(r, "fraction inside 1.03*sqrt(2) disk", double(inside) / total, 0.99);
  double worst = 0.0;
  for (int ix = 0; ix < nb; ++ix) {
    for (int iy = 0; iy < nb; ++iy) {
      bool interior = true;
      for (double x : {lo + w * ix, lo + w * (ix + 1)})
        for (double y : {lo + w * iy, lo + w * (iy + 1)})
          if (std::hypot(x, y) > 0.8 * radius) interior = false;
      if (!interior) continue;
      auto per = std::vector<double>(size_t(draws));
      for (size_t d = 0; d < per.size(); ++d) per[d] = dens[d][size_t(ix) * nb + iy];
      double mu = mean_of(per), sd = 0.0;
      for (double v : per) sd += (v - mu) * (v - mu);
      sd = std::sqrt(sd / double(draws - 1));
      double se = sd / std::sqrt(double(draws));
      double allow = std::max(0.1 * ref, 3.0 * se);
      worst = std::max(worst, std::abs(mu - ref) / allow);
    }
  }
  check_le(r, "worst interior bin deviation over allowance", worst, 1.0);
}

// Trace-squared support geometry and mean normalized trace.
void c06_trace_squared(CriterionResult& r, uint64_t seed, int) {
  const ModelParams p = params_of(0.5, 1.0, 2.0, 64);
  SamplerConfig cfg;
  cfg.params = p;
  cfg.seed = seed;
  TraceSquaredChain chain(cfg);
  const long states = 2000;
  std::vector<double> qvals, tj;
  const double k = solve_k(p.tau, p.gamma, p.k_p);
  EllipseStrong ell = ellipse_strong(p.tau, p.gamma * k);
  for (long s = 0; s < states; ++s) {
    SpectrumSample sp = chain.next();
    tj.push_back(sp.trace_jj / p.n);
    for (cd z : sp.eigenvalues)
      qvals.push_back(ell.q_re * z.real() * z.real() +
                      ell.q_im * z.imag() * z.imag());
  }
  size_t idx = size_t(0.995 * double(qvals.size() - 1));
  std::nth_element(qvals.begin(), qvals.begin() + long(idx), qvals.end());
  double scale = std::sqrt(qvals[idx] / ell.bound);
  // Known to sit red at this size: the pooled 0.995-quantile has an
  // O(n^{-1/2}) edge-smearing bias (~13% at n = 64 even for the exact
  // gamma = 0 elliptic sampler). The target is kept literal regardless.
  check_le(r, "semi-axis scale |0.995-quantile ratio - 1|", std::abs(scale - 1.0),
           0.05);
  double kb = p.k_p + k;
  check_le(r, "relative error of mean tr JJ*/n", std::abs(mean_of(tj) - kb) / kb,
           0.02);
}

// Local pair correlation of the fixed-trace disk against 1 - e^{-r^2}.
void c07_pair_correlation(CriterionResult& r, uint64_t seed, int threads) {
  const int n = 128, draws = 1000;
  auto samples = collect_draws(draws, threads, [&](long d) {
    return spectrum_of(sample_ft_ginibre(n, 1.0, seed, uint64_t(d)),
                       EnsembleTag::ft_ginibre, seed);
  });
  auto edges = linspace_edges(0.2, 3.0, 14);
  LocalCorrelationEstimate est =
      local_pair_correlation(samples, cd(0.0, 0.0), std::sqrt(double(n)), edges,
                             seed);
  double worst = 0.0;
  for (size_t i = 0; i < est.g2.size(); ++i) {
    double rc = 0.5 * (edges[i] + edges[i + 1]);
    double ref = 1.0 - std::exp(-rc * rc);
    worst = std::max(worst, std::abs(est.g2[i] - ref) / (3.0 * est.se[i]));
  }
  check_le(r, "worst bin |g2 - (1-e^{-r^2})| over 3 SE", worst, 1.0);
}

// Weak-regime collapse of the fixed-trace elliptic chain.
void c08_weak_collapse(CriterionResult& r, uint64_t seed, int) {
  const int n = 256;
  SamplerConfig cfg;
  cfg.params = params_of(1.0 - 1.0 / n, 0.0, 1.0, n);
  cfg.seed = seed;
  FtEllipticChain chain(cfg);
  std::vector<SpectrumSample> samples;
  for (int s = 0; s < 200; ++s) samples.push_back(chain.next());
  check_le(r, "off-axis mass at band 0.1", off_axis_mass(samples, 0.1), 0.01);
  Marginal1D marg = marginal_x(samples, linspace_edges(-2.1, 2.1, 42));
  GofResult g = gof(marg, [](double x) {
    return std::sqrt(std::max(0.0, 4.0 - x * x)) / (2.0 * M_PI);
  });
  check_le(r, "KS distance of real marginal to semicircle", g.ks, 0.05);
}

// Analytic route to the interval kernel: rescaled finite sum versus the
// interval form, with the n-decay of the sup error.
void c09_weak_kernel_route(CriterionResult& r, uint64_t, int) {
  const cd grid[5] = {{0, 0}, {0.7, 0}, {-0.4, 0.3}, {0.5, -0.5}, {-0.8, -0.2}};
  const double at = 1.0, c = 1.0;
  double err200 = 0.0, err800 = 0.0;
  for (int n : {200, 800}) {
    double tau = 1.0 - at * at / (2.0 * c * c * n);
    KernelContext fx =
        make_context(params_of(tau, 0.0, 1.0, n), KernelRegime::finite_n_sum);
    double sup = 0.0;
    for (cd zi : grid) {
      for (cd zj : grid) {
        cd kf = kernel_finite_n(zi / (c * n), zj / (c * n), fx) /
                (c * c * double(n) * double(n));
        cd kp = k_weak_prop(0.0, zi, zj, at, c);
        sup = std::max(sup, std::abs(kf - kp));
      }
    }
    double bound = 10.0 * std::log(double(n)) / std::sqrt(double(n));
    char label[64];
    std::snprintf(label, sizeof label, "sup error on 5x5 grid at n=%d", n);
    check_le(r, label, sup, bound);
    (n == 200 ? err200 : err800) = sup;
  }
  check_le(r, "sup error ratio n=800 over n=200", err800 / err200, 0.55);
}

// Monte Carlo weak-universality headline: interpolating diagonal profile
// from the trace-squared chain, with the gamma = 0 elliptic baseline.
void c10_weak_profile_mc(CriterionResult& r, uint64_t seed, int threads) {
  const int n = 200;
  const long draws = 10000;
  const double alpha = 1.0;
  auto edges = linspace_edges(-3.0, 3.0, 24);
  auto profile_l1 = [&](const std::vector<SpectrumSample>& samples, double c) {
    Marginal1D prof = weak_profile(samples, 0.0, alpha, c, edges);
    GofResult g = gof(prof, [&](double y) {
      return k_weak(cd(0.0, y), cd(0.0, y), alpha).real();
    });
    return std::pair<double, long>(g.l1, prof.n_points);
  };

  // Trace-squared target: thinning of 25 sweeps clears the measured
  // per-entry decorrelation time (5-10 sweeps) at these parameters, so the
  // kept states count as effective draws.
  const double c_ts = c_weak(1.0, 2.0);
  WeakScaling ws = weak_scaling(0.0, alpha, c_ts);
  SamplerConfig cfg;
  cfg.params = params_of(ws.tau_n(n), 1.0, 2.0, n);
  cfg.seed = seed;
  cfg.chain = ChainConfig{0.0, 100000, 25, 0.3};
  TraceSquaredChain chain(cfg);
  std::vector<SpectrumSample> ts_samples;
  ts_samples.reserve(size_t(draws));
  for (long s = 0; s < draws; ++s) ts_samples.push_back(chain.next());
  auto [l1_ts, pts_ts] = profile_l1(ts_samples, c_ts);
  check_ge(r, "trace-squared kept states", double(draws), 1e4);
  check_ge(r, "trace-squared window points", double(pts_ts), 1e4);
  check_le(r, "trace-squared profile L1 distance", l1_ts, 0.1);
  ts_samples.clear();
  ts_samples.shrink_to_fit();

  WeakScaling wse = weak_scaling(0.0, alpha, 1.0);
  const double tau_e = wse.tau_n(n);
  auto ell_samples = collect_draws(draws, threads, [&](long d) {
    return spectrum_of(sample_elliptic(n, tau_e, seed, uint64_t(d)),
                       EnsembleTag::elliptic, seed);
  });
  auto [l1_el, pts_el] = profile_l1(ell_samples, 1.0);
  check_ge(r, "elliptic baseline window points", double(pts_el), 1e4);
  check_le(r, "elliptic baseline profile L1 distance", l1_el, 0.1);
}

// Interpolating kernel limits: strong match at large alpha, sine-kernel
// diagonal integral at small alpha.
void c11_kernel_limits(CriterionResult& r, uint64_t, int) {
  {
    const double alpha = 50.0;
    cd z1(0.2, 0.1), z2(-0.4, 0.3);
    auto kw = [&](cd u, cd v) {
      return alpha * alpha * k_weak(alpha * u, alpha * v, alpha);
    };
    cd dw = kw(z1, z1) * kw(z2, z2) - kw(z1, z2) * kw(z2, z1);
    cd ds = k_strong(z1, z1) * k_strong(z2, z2) -
            k_strong(z1, z2) * k_strong(z2, z1);
    check_le(r, "alpha=50 rescaled 2x2 determinant relative error",
             std::abs(dw - ds) / std::abs(ds), 1e-2);
  }
  {
    const double alpha = 0.05;
    auto f = [](double x) {
      return std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI);
    };
    const QuadRule rx = gl_panels(-6.0, 6.0, 12, 24);
    const QuadRule ry = gl_panels(-5.0 * alpha, 5.0 * alpha, 12, 10);
    double total = 0.0;
    for (size_t i = 0; i < rx.x.size(); ++i) {
      double row = 0.0;
      for (size_t j = 0; j < ry.x.size(); ++j) {
        cd z(rx.x[i], ry.x[j]);
        row += ry.w[j] * k_weak(z, z, alpha).real();
      }
      total += rx.w[i] * f(rx.x[i]) * row;
    }
    check_le(r, "alpha=0.05 sine-diagonal integral error",
             std::abs(total - 1.0), 1e-2);
  }
}

// Entry covariances of the Gaussian measure and the mean trace identity.
void c12_entry_covariances(CriterionResult& r, uint64_t seed, int threads) {
  {
    const int n = 8, draws = 100000;
    SamplerConfig cfg;
    cfg.params = params_of(0.5, 1.0, 2.0, n);
    cfg.seed = seed;
    PabCovariance cov = covariance_pab(cfg.params);
    std::vector<double> re01(draws), re10(draws), im01(draws), im10(draws),
        dre(draws), dim(draws);
    parallel_for(draws, threads, [&](long d) {
      ComplexMatrix m = sample_pab(cfg, uint64_t(d));
      re01[size_t(d)] = m.at(0, 1).real();
      re10[size_t(d)] = m.at(1, 0).real();
      im01[size_t(d)] = m.at(0, 1).imag();
      im10[size_t(d)] = m.at(1, 0).imag();
      dre[size_t(d)] = m.at(0, 0).real();
      dim[size_t(d)] = m.at(0, 0).imag();
    });
    VarStats vo = var_stats(re01);
    check_le(r, "off-diagonal variance error over 5 SE",
             std::abs(vo.var - cov.var_off) / (5.0 * vo.se), 1.0);
    VarStats vr = var_stats(dre);
    check_le(r, "diagonal real variance error over 5 SE",
             std::abs(vr.var - cov.var_diag_re) / (5.0 * vr.se), 1.0);
    VarStats vi = var_stats(dim);
    check_le(r, "diagonal imaginary variance error over 5 SE",
             std::abs(vi.var - cov.var_diag_im) / (5.0 * vi.se), 1.0);
    CovStats cr = cov_stats(re01, re10);
    check_le(r, "opposite-entry real covariance error over 5 SE",
             std::abs(cr.cov - cov.cov_real) / (5.0 * cr.se), 1.0);
    CovStats ci = cov_stats(im01, im10);
    check_le(r, "opposite-entry imaginary covariance error over 5 SE",
             std::abs(ci.cov + cov.cov_real) / (5.0 * ci.se), 1.0);
  }
  const double k = solve_k(0.5, 1.0, 2.0);
  for (int n : {64, 128, 256}) {
    int draws = n <= 64 ? 2000 : (n <= 128 ? 1000 : 600);
    SamplerConfig cfg;
    cfg.params = params_of(0.5, 1.0, 2.0, n);
    cfg.seed = seed;
    auto tj = std::vector<double>(size_t(draws));
    parallel_for(draws, threads, [&](long d) {
      ComplexMatrix m = sample_pab(cfg, uint64_t(d));
      double s = 0.0;
      for (const cd& v : m.a) s += std::norm(v);
      tj[size_t(d)] = s;
    });
    char label[64];
    std::snprintf(label, sizeof label, "|mean tr JJ* - n(k_p + K)| at n=%d", n);
    check_le(r, label, std::abs(mean_of(tj) - n * (2.0 + k)), 5.0);
  }
}

// Two-eigenvalue Coulomb gas against the exact second-moment value 3/2.
void c13_coulomb_oracle(CriterionResult& r, uint64_t seed, int) {
  SamplerConfig cfg;
  cfg.params = params_of(0.0, 0.0, 1.0, 2);
  cfg.seed = seed;
  cfg.chain = ChainConfig{0.0, 20000, 4, 0.3};
  CoulombChain chain(cfg);
  std::vector<double> s2;
  s2.reserve(60000);
  for (int s = 0; s < 60000; ++s) s2.push_back(chain.next().trace_jj);
  check_le(r, "relative error of E[sum |z|^2] against 3/2",
           std::abs(mean_of(s2) - 1.5) / 1.5, 0.02);
}

// Eigensolver: trace identity across sizes and companion-matrix roots.
void c14_eigensolver(CriterionResult& r, uint64_t seed, int) {
  for (int n : {4, 16, 64, 256}) {
    ComplexMatrix m = sample_ginibre(n, seed, uint64_t(1000 + n));
    Spectrum s = eigenvalues(m);
    cd sum(0.0, 0.0);
    for (cd v : s.values) sum += v;
    char label[64];
    std::snprintf(label, sizeof label, "trace identity residual ratio at n=%d",
                  n);
    check_le(r, label, std::abs(sum - trace(m)) / frobenius_norm(m), 1e-10);
  }
  const int deg = 12;
  ComplexMatrix comp(deg);
  for (int i = 1; i < deg; ++i) comp.at(i, i - 1) = 1.0;
  comp.at(0, deg - 1) = 1.0;  // companion of z^12 - 1
  Spectrum s = eigenvalues(comp);
  double worst = 0.0;
  for (int k = 0; k < deg; ++k) {
    cd want = std::exp(cd(0.0, 2.0 * M_PI * k / deg));
    double best = 1e300;
    for (cd v : s.values) best = std::min(best, std::abs(v - want));
    worst = std::max(worst, best);
  }
  check_le(r, "max distance of companion roots to 12th roots of unity", worst,
           1e-8);
}

}  // namespace

const CheckLine* CriterionResult::binding() const {
  const CheckLine* pick = nullptr;
  double best = 1e300;
  for (const auto& c : checks) {
    if (!c.pass && (!pick || pick->pass)) {
      pick = &c;
      best = -1.0;
      continue;
    }
    if (pick && !pick->pass) continue;
    double slack = std::abs(c.bound - c.measured) /
                   std::max(std::abs(c.bound), 1e-300);
    if (!pick || slack < best) {
      pick = &c;
      best = slack;
    }
  }
  return pick;
}

const std::vector<CriterionInfo>& criterion_catalog() {
  static const std::vector<CriterionInfo> table = {
      {1, "orthonormality", "specfun"},
      {2, "uniform-gamma", "specfun"},
      {3, "kernel-equivalence", "kernel"},
      {4, "elliptic-law", "strong-universality"},
      {5, "fixed-trace-disk", "strong-universality"},
      {6, "trace-squared-support", "strong-universality"},
      {7, "pair-correlation", "strong-universality"},
      {8, "weak-collapse", "weak-universality"},
      {9, "weak-kernel-route", "weak-universality"},
      {10, "weak-profile-mc", "weak-universality"},
      {11, "kernel-limits", "kernel"},
      {12, "entry-covariances", "sampling"},
      {13, "coulomb-oracle", "sampling"},
      {14, "eigensolver", "linalg"},
  };
  return table;
}

std::vector<int> select_criteria(const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  for (const auto& tok : tokens) {
    if (tok.empty()) continue;
    if (tok == "all") {
      for (const auto& info : criterion_catalog()) ids.push_back(info.id);
      continue;
    }
    bool numeric = std::all_of(tok.begin(), tok.end(),
                               [](char c) { return c >= '0' && c <= '9'; });
    if (numeric) {
      int id = std::atoi(tok.c_str());
      bool known = false;
      for (const auto& info : criterion_catalog()) known |= info.id == id;
      if (!known)
        throw std::invalid_argument("select_criteria: unknown criterion id " +
                                    tok);
      ids.push_back(id);
      continue;
    }
    bool matched = false;
    for (const auto& info : criterion_catalog()) {
      if (tok == info.name || tok == info.suite) {
        ids.push_back(info.id);
        matched = true;
      }
    }
    if (!matched)
      throw std::invalid_argument("select_criteria: unknown selection token '" +
                                  tok + "'");
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

CriterionResult run_criterion(int id, std::uint64_t seed, int threads) {
  CriterionResult r;
  r.id = id;
  for (const auto& info : criterion_catalog()) {
    if (info.id == id) {
      r.name = info.name;
      r.suite = info.suite;
    }
  }
  if (r.name.empty())
    throw std::invalid_argument("run_criterion: unknown criterion id " +
                                std::to_string(id));
  auto t0 = std::chrono::steady_clock::now();
  switch (id) {
    case 1: c01_orthonormality(r, seed, threads); break;
    case 2: c02_uniform_gamma(r, seed, threads); break;
    case 3: c03_kernel_equivalence(r, seed, threads); break;
    case 4: c04_elliptic_law(r, seed, threads); break;
    case 5: c05_ft_disk(r, seed, threads); break;
    case 6: c06_trace_squared(r, seed, threads); break;
    case 7: c07_pair_correlation(r, seed, threads); break;
    case 8: c08_weak_collapse(r, seed, threads); break;
    case 9: c09_weak_kernel_route(r, seed, threads); break;
    case 10: c10_weak_profile_mc(r, seed, threads); break;
    case 11: c11_kernel_limits(r, seed, threads); break;
    case 12: c12_entry_covariances(r, seed, threads); break;
    case 13: c13_coulomb_oracle(r, seed, threads); break;
    case 14: c14_eigensolver(r, seed, threads); break;
    default: break;
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  r.passed = !r.checks.empty();
  for (const auto& c : r.checks) r.passed = r.passed && c.pass;
  return r;
}

}  // namespace rmt
