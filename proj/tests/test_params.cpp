#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rmt/params.hpp"

using rmt::ModelParams;

namespace {

double relation_rhs(double tau, double gamma, double k) {
  double omt2 = 1.0 - tau * tau;
  double den = 1.0 + 4.0 * gamma * k + 4.0 * gamma * gamma * k * k * omt2;
  return (1.0 + 2.0 * gamma * k * omt2) / den;
}

}  // namespace

TEST_CASE("solve_k closed cases") {
  CHECK(rmt::solve_k(0.3, 0.0, 0.5) == 0.5);  // gamma = 0 branch is exact
  for (double tau : {0.0, 0.5, -0.7}) {
    for (double gamma : {0.1, 1.0, 10.0}) {
      CHECK(rmt::solve_k(tau, gamma, 1.0) == 0.0);
    }
  }
  // tau = 0, gamma = 1, k_p = 2: cubic factors (2K+1)(2K^2+5K+1),
  // rightmost root above the pole -1/2 is (-5+sqrt(17))/4.
  double want = (-5.0 + std::sqrt(17.0)) / 4.0;
  CHECK(std::abs(rmt::solve_k(0.0, 1.0, 2.0) - want) < 1e-12);
}

TEST_CASE("solve_k satisfies the defining relation across the domain") {
  for (double tau : {-0.8, -0.3, 0.0, 0.5, 0.9}) {
    for (double gamma : {0.0, 0.05, 0.5, 2.0, 50.0}) {
      for (double k_p : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        double k = rmt::solve_k(tau, gamma, k_p);
        CAPTURE(tau);
        CAPTURE(gamma);
        CAPTURE(k_p);
        CHECK(std::abs(k_p + k - relation_rhs(tau, gamma, k)) <= 1e-12);
        // admissibility: strictly right of both poles
        if (gamma > 0.0) {
          CHECK(k > -1.0 / (2.0 * gamma * (1.0 + std::abs(tau))));
        }
      }
    }
  }
}

TEST_CASE("kbar closed cases and tau -> 1 consistency") {
  CHECK(rmt::kbar(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  double want = (-9.0 + std::sqrt(65.0)) / 8.0;
  CHECK(std::abs(rmt::kbar(1.0, 2.0) - want) < 1e-14);
  CHECK(rmt::kbar(0.0, 1.75) == 1.0 - 1.75);
  for (double gamma : {0.5, 1.0, 4.0}) {
    for (double k_p : {0.5, 2.0}) {
      double diff = std::abs(rmt::solve_k(1.0 - 1e-6, gamma, k_p) - rmt::kbar(gamma, k_p));
      CAPTURE(gamma);
      CAPTURE(k_p);
      CHECK(diff < 1e-4);  // O(|tau - 1|) with a modest constant
    }
  }
}

TEST_CASE("k_ft closed cases and large-gamma agreement") {
  CHECK(std::abs(rmt::k_ft(0.0, 1.0) - 0.0) < 1e-14);
  CHECK(std::abs(rmt::k_ft(0.0, 2.0) + 0.25) < 1e-14);
  for (double k_p : {0.5, 1.0, 3.0}) {
    double lim = (1.0 / k_p - 1.0) / 4.0;
    CHECK(std::abs(rmt::k_ft(1.0 - 1e-12, k_p) - lim) < 1e-6);
  }
  for (double tau : {0.0, 0.5}) {
    for (double k_p : {0.5, 1.0, 2.0}) {
      double prod = 1e4 * rmt::solve_k(tau, 1e4, k_p);
      CAPTURE(tau);
      CAPTURE(k_p);
      CHECK(std::abs(prod - rmt::k_ft(tau, k_p)) <= 0.01);
    }
  }
}

TEST_CASE("c_weak closed cases and the 1 + 4 gamma kbar identity") {
  CHECK(rmt::c_weak(0.0, 0.7) == 1.0);
  CHECK(std::abs(rmt::c_weak(3.0, 1.0) - 1.0) < 1e-14);
  CHECK(std::abs(rmt::c_weak(1.0, 2.0) - (-3.5 + std::sqrt(65.0) / 2.0)) < 1e-14);
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j <= 20; ++j) {
      double gamma = 0.25 * i;
      double k_p = 0.2 * j;
      double lhs = rmt::c_weak(gamma, k_p);
      double rhs = 1.0 + 4.0 * gamma * rmt::kbar(gamma, k_p);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      CHECK(lhs > 0.0);
    }
  }
}

TEST_CASE("ellipse_strong closed cases") {
  auto disk = rmt::ellipse_strong(0.0, 0.0);
  CHECK(disk.q_re == 1.0);
  CHECK(disk.q_im == 1.0);
  CHECK(disk.scale_c == 1.0);
  CHECK(std::abs(disk.semi_re() - 1.0) < 1e-15);

  auto ell = rmt::ellipse_strong(0.5, 0.0);
  CHECK(std::abs(ell.semi_re() - 1.5) < 1e-12);
  CHECK(std::abs(ell.semi_im() - 0.5) < 1e-12);
  CHECK(std::abs(ell.scale_c - 1.0 / (1.0 - 0.25)) < 1e-14);

  // fixed trace at tau = 0, k_p = 2: gamma*K -> k_ft = -1/4, disk radius sqrt(2)
  auto ft = rmt::ellipse_strong(0.0, rmt::k_ft(0.0, 2.0));
  CHECK(std::abs(ft.semi_re() - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(ft.semi_im() - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(ft.scale_c - 0.5) < 1e-14);

  // elliptic-law recovery across tau
  for (double tau : {-0.9, -0.4, 0.2, 0.8}) {
    auto e = rmt::ellipse_strong(tau, 0.0);
    CHECK(std::abs(e.semi_re() - (1.0 + tau)) < 1e-12);
    CHECK(std::abs(e.semi_im() - (1.0 - tau)) < 1e-12);
  }

  auto thin = rmt::ellipse_strong(1.0 - 1e-14, 0.0);
  CHECK(thin.degenerate);
  CHECK(thin.contains(0.5, 0.0));
  CHECK(!thin.contains(0.5, 0.1));
}

TEST_CASE("covariance_pab closed cases") {
  ModelParams p;
  p.tau = 0.5;
  p.gamma = 0.0;
  p.k_p = 0.5;
  p.n = 64;
  auto c = rmt::covariance_pab(p);
  CHECK(std::abs(c.var_diag_re - 1.5 / 128.0) < 1e-16);
  CHECK(std::abs(c.var_diag_im - 0.5 / 128.0) < 1e-16);
  CHECK(std::abs(c.var_off - 1.0 / 128.0) < 1e-16);
  CHECK(std::abs(c.cov_real - 0.5 / 128.0) < 1e-16);

  p.tau = 0.0;
  auto g = rmt::covariance_pab(p);
  CHECK(std::abs(g.var_diag_re - 1.0 / 128.0) < 1e-18);
  CHECK(std::abs(g.var_diag_im - 1.0 / 128.0) < 1e-18);
  CHECK(g.cov_real == 0.0);
}

TEST_CASE("mean Tr JJ* equals N(k_p + K) identically") {
  for (double tau : {0.0, 0.5, -0.6}) {
    for (double gamma : {0.0, 1.0, 3.0}) {
      for (double k_p : {0.5, 1.0, 2.0}) {
        for (int n : {8, 64, 256}) {
          ModelParams p;
          p.tau = tau;
          p.gamma = gamma;
          p.k_p = k_p;
          p.n = n;
          auto c = rmt::covariance_pab(p);
          double k = rmt::solve_k(tau, gamma, k_p);
          CAPTURE(tau);
          CAPTURE(gamma);
          CAPTURE(k_p);
          CAPTURE(n);
          CHECK(std::abs(c.mean_trace_jj - n * (k_p + k)) <= 1e-10);
          // the same cancellation, stated as the variance identity
          CHECK(std::abs(c.var_diag_re + c.var_diag_im - 2.0 * c.var_off) <=
                1e-15 * (c.var_diag_re + c.var_diag_im));
          CHECK(c.lambda_plus_sq > 0.0);
          CHECK(c.lambda_minus_sq > 0.0);
          CHECK(std::abs(c.cov_real) < c.var_off);
        }
      }
    }
  }
}

TEST_CASE("derive: normalizability and assembled fields over random tuples") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> utau(-0.95, 0.95);
  std::uniform_real_distribution<double> ugam(0.0, 8.0);
  std::uniform_real_distribution<double> ukp(0.1, 4.0);
  for (int i = 0; i < 1000; ++i) {
    ModelParams p;
    p.tau = utau(gen);
    p.gamma = ugam(gen);
    p.k_p = ukp(gen);
    p.n = 2 + int(i % 200);
    auto d = rmt::derive(p);
    CAPTURE(p.tau);
    CAPTURE(p.gamma);
    CAPTURE(p.k_p);
    CHECK(d.a_t.real() > std::abs(d.b));  // a(0) > |b|
    CHECK(std::abs(d.c_kbar - rmt::c_weak(p.gamma, p.k_p)) <=
          1e-12 * std::max(1.0, d.c_kbar));
    CHECK(d.ellipse.scale_c > 0.0);
  }
  ModelParams q;
  q.tau = 0.5;
  q.gamma = 0.0;
  q.k_p = 1.0;
  q.n = 32;
  q.t = 3.0;
  auto d = rmt::derive(q);
  CHECK(d.a_t == rmt::cd(32.0 / 0.75, -3.0));
  CHECK(std::abs(d.b - 0.5 * 32.0 / 0.75) < 1e-12);
  CHECK(std::isfinite(d.c_at_sq.real()));
  q.tau = 0.0;
  auto d0 = rmt::derive(q);
  CHECK(std::isinf(d0.c_at_sq.real()));
}

TEST_CASE("weak_scaling closed cases") {
  auto w = rmt::weak_scaling(0.0, 1.0, 1.0);
  CHECK(std::abs(w.nu - 1.0 / M_PI) < 1e-15);
  CHECK(std::abs(w.alpha_tilde - M_PI) < 1e-14);

  auto w1 = rmt::weak_scaling(1.0, 2.0, 1.0);
  CHECK(std::abs(w1.nu - std::sqrt(3.0) / (2.0 * M_PI)) < 1e-15);
  CHECK(std::abs(w1.alpha_tilde / w1.alpha - w1.c / w1.nu) < 1e-12);

  // tau_n and the local scale at a concrete size
  int n = 200;
  CHECK(std::abs(w.tau_n(n) - (1.0 - 1.0 / (2.0 * n * w.nu * w.nu))) < 1e-15);
  CHECK(w.local_scale(n) == n * w.nu);

  CHECK_THROWS_AS(rmt::weak_scaling(2.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(rmt::weak_scaling(0.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.tau = 1.0;
  CHECK_THROWS_AS(rmt::validate(p), std::domain_error);
  p.tau = 0.0;
  p.k_p = 0.0;
  CHECK_THROWS_AS(rmt::validate(p), std::domain_error);
  p.k_p = 1.0;
  p.n = 1;
  CHECK_THROWS_AS(rmt::validate(p), std::domain_error);
}
