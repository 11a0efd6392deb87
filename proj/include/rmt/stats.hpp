#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rmt/ensembles.hpp"

namespace rmt {

// 2D spectral histogram. counts[ix][iy] holds eigenvalues with
// x_edges[ix] <= Re z < x_edges[ix+1] and y_edges[iy] <= Im z < y_edges[iy+1].
// n_points counts in-range eigenvalues; out_of_range tallies the rest, so
// n_points + out_of_range equals the total eigenvalue count.
struct Histogram2D {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<std::vector<long>> counts;
  long n_samples = 0;
  long n_points = 0;
  long out_of_range = 0;

  // Per-eigenvalue density estimate of one bin: count/(total * bin area).
  double density(int ix, int iy) const;
};

// 1D histogram with a per-eigenvalue normalized density estimate
// (density integrates to the in-range mass fraction) and a standard error
// per bin: across-sample spread when several samples contribute, the
// Poisson approximation for a single sample.
struct Marginal1D {
  std::vector<double> edges;
  std::vector<long> counts;
  std::vector<double> density;
  std::vector<double> se;
  long n_samples = 0;
  long n_points = 0;
  long out_of_range = 0;
};

// Local pair-correlation estimate around a fixed center at a fixed
// rescaling: g2[i] estimates the normalized 2-point function on the
// separation bin [r_edges[i], r_edges[i+1]) with a bootstrap SE.
struct LocalCorrelationEstimate {
  cd center;
  double scale = 1.0;
  std::vector<double> r_edges;
  std::vector<double> g2;
  std::vector<double> se;
  double intensity = 0.0;  // empirical local intensity in rescaled units
  long n_pairs = 0;
  std::string warning;
};

struct GofResult {
  double ks = 0.0;
  double l1 = 0.0;
  double chi2_p = 1.0;
};

// Bin all eigenvalues of all samples into the 2D grid.
Histogram2D esd_hist(const std::vector<SpectrumSample>& samples,
                     const std::vector<double>& x_edges,
                     const std::vector<double>& y_edges);

// Bin real parts; density normalized per eigenvalue.
Marginal1D marginal_x(const std::vector<SpectrumSample>& samples,
                      const std::vector<double>& edges);

// Fraction of eigenvalues with |Im z| > delta_band.
double off_axis_mass(const std::vector<SpectrumSample>& samples, double delta_band);

// Pair correlation g2(r) from eigenvalues rescaled as u = (z - center)*scale.
// Pairs are counted from centers inside radius r_max (the last edge) toward
// partners inside radius 2*r_max, so every separation annulus lies fully
// inside the observation window; normalization uses the empirical intensity
// measured on the same window. SEs from a seeded bootstrap (200 resamples
// over whole spectra).
LocalCorrelationEstimate local_pair_correlation(
    const std::vector<SpectrumSample>& samples, cd center, double scale,
    const std::vector<double>& r_edges, uint64_t bootstrap_seed = 1);

// Profile of rescaled imaginary parts y = n*nu(X)*Im z for eigenvalues in
// the window |Re z - X| <= 0.2/sqrt(c). Throws std::runtime_error (with the
// observed count) when fewer than 50 eigenvalues land in the window.
Marginal1D weak_profile(const std::vector<SpectrumSample>& samples, double x_center,
                        double alpha, double c, const std::vector<double>& y_edges);

// Distances between a binned sample and an analytic density on the same
// axis. The density is evaluated at bin centers and normalized over the
// binned range; ks is the max gap of binned CDFs, l1 the total variation
// of bin masses, chi2_p the Pearson p-value over bins with expected
// count >= 5. Throws std::domain_error on empty data.
GofResult gof(const Marginal1D& m, const std::function<double(double)>& density);

// 2D variant: bins are flattened in row-major order for l1/chi2; ks is the
// max gap of the bin-corner cumulative distributions.
GofResult gof(const Histogram2D& h,
              const std::function<double(double, double)>& density);

// Serializers. Histogram rows: x_lo,x_hi,y_lo,y_hi,count,density.
// Marginal rows: bin_lo,bin_hi,count,density,se. g2 rows: r_lo,r_hi,g2,se.
std::string histogram_csv(const Histogram2D& h);
std::string marginal_csv(const Marginal1D& m);
std::string g2_csv(const LocalCorrelationEstimate& e);
std::string gof_json(const GofResult& g);

}  // namespace rmt
