#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "rmt/kernels.hpp"
#include "rmt/rng.hpp"
#include "rmt/stats.hpp"

using rmt::cd;
using rmt::SpectrumSample;

namespace {

constexpr uint64_t kSeed = 20260822;

std::vector<double> linspace_edges(double lo, double hi, int bins) {
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * double(i) / bins;
  return e;
}

SpectrumSample points_sample(std::vector<cd> pts) {
  SpectrumSample s;
  s.eigenvalues = std::move(pts);
  return s;
}

std::vector<SpectrumSample> uniform_disk_samples(double radius, int n_samples,
                                                 int per_sample, uint64_t stream) {
  rmt::RngStream rng(kSeed, stream);
  std::vector<SpectrumSample> out;
  for (int s = 0; s < n_samples; ++s) {
    std::vector<cd> pts;
    while (int(pts.size()) < per_sample) {
      double x = radius * (2.0 * rng.uniform01() - 1.0);
      double y = radius * (2.0 * rng.uniform01() - 1.0);
      if (x * x + y * y <= radius * radius) pts.emplace_back(x, y);
    }
    out.push_back(points_sample(std::move(pts)));
  }
  return out;
}

}  // namespace

TEST_CASE("esd_hist bins a single point") {
  std::vector<SpectrumSample> s = {points_sample({cd(0.0, 0.0)})};
  rmt::Histogram2D h = rmt::esd_hist(s, {-0.5, 0.5}, {-0.5, 0.5});
  CHECK(h.counts[0][0] == 1);
  CHECK(h.n_points == 1);
  CHECK(h.out_of_range == 0);
  CHECK(h.n_samples == 1);
}

TEST_CASE("esd_hist is flat on uniform disk points") {
  const double radius = 1.0;
  auto samples = uniform_disk_samples(radius, 100, 500, 11);
  auto xe = linspace_edges(-1.0, 1.0, 8);
  rmt::Histogram2D h = rmt::esd_hist(samples, xe, xe);
  long total = h.n_points + h.out_of_range;
  CHECK(total == 100 * 500);
  const double bin = 0.25;
  for (size_t ix = 0; ix + 1 < xe.size(); ++ix) {
    for (size_t iy = 0; iy + 1 < xe.size(); ++iy) {
      // Only bins fully inside the disk have the uniform expectation.
      double cx = std::max(std::abs(xe[ix]), std::abs(xe[ix + 1]));
      double cy = std::max(std::abs(xe[iy]), std::abs(xe[iy + 1]));
      if (cx * cx + cy * cy >= radius * radius) continue;
      double p = bin * bin / (M_PI * radius * radius);
      double expect = double(total) * p;
      double se = std::sqrt(double(total) * p * (1.0 - p));
      CAPTURE(ix);
      CAPTURE(iy);
      CHECK(std::abs(double(h.counts[ix][iy]) - expect) <= 3.0 * se);
    }
  }
}

TEST_CASE("esd_hist fixed-trace disk density is uniform" * doctest::timeout(240)) {
  const int n = 256, draws = 50;
  const double k_p = 2.0;
  std::vector<SpectrumSample> samples;
  for (int d = 0; d < draws; ++d) {
    rmt::ComplexMatrix m = rmt::sample_ft_ginibre(n, k_p, kSeed, uint64_t(d));
    samples.push_back(rmt::spectrum_of(m, rmt::EnsembleTag::ft_ginibre, kSeed));
  }
  auto xe = linspace_edges(-1.5, 1.5, 12);
  rmt::Histogram2D h = rmt::esd_hist(samples, xe, xe);
  const double r_int = 0.8 * std::sqrt(2.0);
  std::vector<double> dens;
  for (size_t ix = 0; ix + 1 < xe.size(); ++ix) {
    for (size_t iy = 0; iy + 1 < xe.size(); ++iy) {
      double cx = std::max(std::abs(xe[ix]), std::abs(xe[ix + 1]));
      double cy = std::max(std::abs(xe[iy]), std::abs(xe[iy + 1]));
      if (cx * cx + cy * cy >= r_int * r_int) continue;
      dens.push_back(h.density(int(ix), int(iy)));
    }
  }
  REQUIRE(dens.size() >= 12);
  double mean = 0.0;
  for (double v : dens) mean += v;
  mean /= double(dens.size());
  double var = 0.0;
  for (double v : dens) var += (v - mean) * (v - mean);
  var /= double(dens.size() - 1);
  double cv = std::sqrt(var) / mean;
  CHECK(cv <= 0.1);
  // Interior density sits at the uniform value 1/(2 pi) on the K_p = 2 disk.
  CHECK(std::abs(mean - 0.5 * M_1_PI) <= 0.1 * 0.5 * M_1_PI);
}

TEST_CASE("marginal_x mirrors symmetric input") {
  std::vector<cd> pts;
  rmt::RngStream rng(kSeed, 12);
  for (int i = 0; i < 400; ++i) {
    double v = rng.normal();
    pts.emplace_back(v, 0.0);
    pts.emplace_back(-v, 0.0);
  }
  rmt::Marginal1D m = rmt::marginal_x({points_sample(pts)}, linspace_edges(-4, 4, 16));
  for (int i = 0; i < 8; ++i) CHECK(m.counts[i] == m.counts[15 - i]);
  CHECK(m.n_points + m.out_of_range == 800);
}

TEST_CASE("marginal_x of the nearly Hermitian ensemble follows the semicircle" *
          doctest::timeout(240)) {
  const int n = 128, draws = 100;
  const double tau = 1.0 - 1.0 / n;
  std::vector<SpectrumSample> samples;
  for (int d = 0; d < draws; ++d) {
    rmt::ComplexMatrix m = rmt::sample_elliptic(n, tau, kSeed, uint64_t(d));
    samples.push_back(rmt::spectrum_of(m, rmt::EnsembleTag::elliptic, kSeed));
  }
  rmt::Marginal1D m = rmt::marginal_x(samples, linspace_edges(-2.2, 2.2, 44));
  rmt::GofResult g = rmt::gof(m, [](double x) {
    double s = 4.0 - x * x;
    return s > 0.0 ? std::sqrt(s) / (2.0 * M_PI) : 0.0;
  });
  CHECK(g.ks <= 0.05);
}

TEST_CASE("off_axis_mass splits the regimes") {
  rmt::ComplexMatrix g = rmt::sample_gue(32, kSeed);
  SpectrumSample gs = rmt::spectrum_of(g, rmt::EnsembleTag::gue, kSeed);
  CHECK(rmt::off_axis_mass({gs}, 1e-6) == 0.0);

  std::vector<SpectrumSample> strong, weak;
  for (int d = 0; d < 20; ++d) {
    strong.push_back(rmt::spectrum_of(rmt::sample_elliptic(64, 0.5, kSeed, d),
                                      rmt::EnsembleTag::elliptic, kSeed));
    weak.push_back(
        rmt::spectrum_of(rmt::sample_elliptic(128, 1.0 - 1.0 / 128, kSeed, d),
                         rmt::EnsembleTag::elliptic, kSeed));
  }
  CHECK(rmt::off_axis_mass(strong, 0.1) >= 0.5);
  CHECK(rmt::off_axis_mass(weak, 0.1) <= 0.01);
  CHECK_THROWS_AS(rmt::off_axis_mass(strong, 0.0), std::domain_error);
}

TEST_CASE("local_pair_correlation is unit on Poisson points") {
  auto samples = uniform_disk_samples(6.5, 200, 120, 13);
  auto est = rmt::local_pair_correlation(samples, cd(0, 0), 1.0,
                                         linspace_edges(0.4, 2.8, 6), kSeed);
  CHECK(est.warning.empty());
  for (size_t b = 0; b < est.g2.size(); ++b) {
    CAPTURE(b);
    CHECK(est.se[b] > 0.0);
    CHECK(std::abs(est.g2[b] - 1.0) <= 3.0 * est.se[b]);
  }
}

TEST_CASE("local_pair_correlation is unit on thinned grids") {
  // Thinned grid of cells, one uniformly placed point per kept cell: cell
  // occupancies are independent, so pair correlations vanish beyond one
  // cell width (far below the first separation bin).
  rmt::RngStream rng(kSeed, 14);
  const double cell = 0.15;
  std::vector<SpectrumSample> samples;
  for (int s = 0; s < 30; ++s) {
    std::vector<cd> pts;
    for (double x = -6.4; x <= 6.4; x += cell)
      for (double y = -6.4; y <= 6.4; y += cell)
        if (rng.uniform01() < 0.3)
          pts.emplace_back(x + cell * rng.uniform01(), y + cell * rng.uniform01());
    samples.push_back(points_sample(std::move(pts)));
  }
  auto est = rmt::local_pair_correlation(samples, cd(0, 0), 1.0,
                                         linspace_edges(0.5, 3.0, 5), kSeed);
  for (size_t b = 0; b < est.g2.size(); ++b) {
    CAPTURE(b);
    CHECK(std::abs(est.g2[b] - 1.0) <= 3.0 * est.se[b]);
  }
}

TEST_CASE("local_pair_correlation matches the planar repulsion profile" *
          doctest::timeout(240)) {
  const int n = 64, draws = 300;
  std::vector<SpectrumSample> samples;
  for (int d = 0; d < draws; ++d) {
    rmt::ComplexMatrix m = rmt::sample_ft_ginibre(n, 1.0, kSeed, uint64_t(d));
    samples.push_back(rmt::spectrum_of(m, rmt::EnsembleTag::ft_ginibre, kSeed));
  }
  // C = 1/K_p = 1; local scale sqrt(C n).
  double scale = std::sqrt(double(n));
  auto est = rmt::local_pair_correlation(samples, cd(0, 0), scale,
                                         linspace_edges(0.25, 3.0, 11), kSeed);
  CHECK(est.warning.empty());
  for (size_t b = 0; b < est.g2.size(); ++b) {
    double rc = 0.5 * (est.r_edges[b] + est.r_edges[b + 1]);
    double want = 1.0 - std::exp(-rc * rc);
    CAPTURE(b);
    CHECK(std::abs(est.g2[b] - want) <= 3.0 * est.se[b] + 0.02);
  }
}

TEST_CASE("local_pair_correlation warns off the support") {
  auto samples = uniform_disk_samples(1.0, 40, 30, 15);
  auto est = rmt::local_pair_correlation(samples, cd(40.0, 0.0), 1.0,
                                         linspace_edges(0.5, 2.0, 3), kSeed);
  CHECK(!est.warning.empty());
}

TEST_CASE("weak_profile matches the interpolating diagonal" *
          doctest::timeout(300)) {
  const int n = 200, draws = 250;
  const double alpha = 1.0, c = 1.0;
  rmt::WeakScaling ws = rmt::weak_scaling(0.0, alpha, c);
  const double tau = ws.tau_n(n);
  std::vector<SpectrumSample> samples;
  for (int d = 0; d < draws; ++d) {
    rmt::ComplexMatrix m = rmt::sample_elliptic(n, tau, kSeed, uint64_t(d));
    samples.push_back(rmt::spectrum_of(m, rmt::EnsembleTag::elliptic, kSeed));
  }
  auto edges = linspace_edges(-3.0, 3.0, 24);
  rmt::Marginal1D prof = rmt::weak_profile(samples, 0.0, alpha, c, edges);
  CHECK(prof.n_points >= 1000);

  // Mirror symmetry within 3 SE.
  for (int i = 0; i < 12; ++i) {
    double diff = std::abs(prof.density[i] - prof.density[23 - i]);
    double se = std::hypot(prof.se[i], prof.se[23 - i]);
    CAPTURE(i);
    CHECK(diff <= 3.0 * se + 1e-12);
  }

  // The y axis carries the n*nu rescaling, which is the native coordinate
  // of the interpolating kernel diagonal at this alpha.
  rmt::GofResult g = rmt::gof(prof, [&](double y) {
    return rmt::k_weak(cd(0.0, y), cd(0.0, y), alpha).real();
  });
  CHECK(g.l1 <= 0.1);

  // Too small a sample set is rejected with a count.
  std::vector<SpectrumSample> tiny(samples.begin(), samples.begin() + 1);
  tiny[0].eigenvalues.resize(4);
  CHECK_THROWS_AS(rmt::weak_profile(tiny, 0.0, alpha, c, edges),
                  std::runtime_error);
}

TEST_CASE("gof distances behave on controls") {
  // Identical binned data: all distances vanish.
  rmt::Marginal1D flat;
  flat.edges = linspace_edges(0.0, 1.0, 10);
  flat.counts.assign(10, 100);
  flat.density.assign(10, 1.0);
  flat.se.assign(10, 0.0);
  flat.n_samples = 1;
  flat.n_points = 1000;
  rmt::GofResult same = rmt::gof(flat, [](double) { return 1.0; });
  CHECK(same.ks <= 1e-12);
  CHECK(same.l1 <= 1e-12);
  CHECK(same.chi2_p > 0.999);

  // Uniform draws against the uniform density: KS at the null scale.
  rmt::RngStream rng(kSeed, 16);
  std::vector<cd> pts;
  for (int i = 0; i < 10000; ++i) pts.emplace_back(rng.uniform01(), 0.0);
  rmt::Marginal1D uni =
      rmt::marginal_x({points_sample(pts)}, linspace_edges(0.0, 1.0, 50));
  rmt::GofResult gu = rmt::gof(uni, [](double) { return 1.0; });
  CHECK(gu.ks <= 1.36 / std::sqrt(10000.0) * 1.5);
  CHECK(gu.chi2_p > 1e-4);

  // Semicircle radius 2 sample against the sqrt(2) radius prediction.
  std::vector<cd> semi;
  while (semi.size() < 10000) {
    double x = 2.0 * (2.0 * rng.uniform01() - 1.0);
    if (rng.uniform01() * 2.0 <= std::sqrt(4.0 - x * x)) semi.emplace_back(x, 0.0);
  }
  rmt::Marginal1D sm =
      rmt::marginal_x({points_sample(semi)}, linspace_edges(-2.0, 2.0, 40));
  rmt::GofResult gs = rmt::gof(sm, [](double x) {
    double s = 2.0 - x * x;
    return s > 0.0 ? std::sqrt(s) : 0.0;
  });
  CHECK(gs.ks >= 0.1);

  rmt::Marginal1D empty;
  empty.edges = {0.0, 1.0};
  empty.counts = {0};
  empty.density = {0.0};
  empty.se = {0.0};
  CHECK_THROWS_AS(rmt::gof(empty, [](double) { return 1.0; }), std::domain_error);
}

TEST_CASE("gof on 2D histograms") {
  auto samples = uniform_disk_samples(1.0, 50, 400, 17);
  auto xe = linspace_edges(-1.0, 1.0, 8);
  rmt::Histogram2D h = rmt::esd_hist(samples, xe, xe);
  rmt::GofResult g = rmt::gof(h, [](double x, double y) {
    return x * x + y * y <= 1.0 ? 1.0 : 0.0;
  });
  // Bin-center indicator misassigns only corner-cut bins.
  CHECK(g.ks <= 0.05);
  rmt::GofResult bad = rmt::gof(h, [](double x, double y) {
    return x * x + y * y <= 0.25 ? 1.0 : 0.0;
  });
  CHECK(bad.ks >= 0.2);
}

TEST_CASE("serializers are deterministic and well formed") {
  auto samples = uniform_disk_samples(1.0, 5, 50, 18);
  auto xe = linspace_edges(-1.0, 1.0, 4);
  rmt::Histogram2D h = rmt::esd_hist(samples, xe, xe);
  std::string hc = rmt::histogram_csv(h);
  CHECK(hc.find("x_lo,x_hi,y_lo,y_hi,count,density") == 0);
  CHECK(hc == rmt::histogram_csv(rmt::esd_hist(samples, xe, xe)));

  rmt::Marginal1D m = rmt::marginal_x(samples, xe);
  std::string mc = rmt::marginal_csv(m);
  CHECK(mc.find("bin_lo,bin_hi,count,density,se") == 0);
  int lines = 0;
  for (char ch : mc)
    if (ch == '\n') ++lines;
  CHECK(lines == 5);

  auto est = rmt::local_pair_correlation(samples, cd(0, 0), 1.0, {0.2, 0.4, 0.6},
                                         kSeed);
  std::string gc = rmt::g2_csv(est);
  CHECK(gc.find("r_lo,r_hi,g2,se") == 0);

  rmt::GofResult g{0.25, 0.5, 0.75};
  std::string gj = rmt::gof_json(g);
  CHECK(gj.find("\"ks\"") != std::string::npos);
  CHECK(gj.find("0.25") != std::string::npos);
}
