#include "rmt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rmt/rng.hpp"
#include "rmt/specfun.hpp"

namespace rmt {

namespace {

void check_edges(const std::vector<double>& e, const char* who) {
  if (e.size() < 2) throw std::domain_error(std::string(who) + ": need >= 2 edges");
  for (size_t i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1]))
      throw std::domain_error(std::string(who) + ": edges must be increasing");
}

// Index of the bin containing v, or -1 when out of range.
int bin_of(const std::vector<double>& edges, double v) {
  if (v < edges.front() || v >= edges.back()) return -1;
  return int(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
}

long total_eigenvalues(const std::vector<SpectrumSample>& samples) {
  long t = 0;
  for (const SpectrumSample& s : samples) t += long(s.eigenvalues.size());
  return t;
}

}  // namespace

double Histogram2D::density(int ix, int iy) const {
  double area = (x_edges[ix + 1] - x_edges[ix]) * (y_edges[iy + 1] - y_edges[iy]);
  long total = n_points + out_of_range;
  if (total == 0) return 0.0;
  return double(counts[ix][iy]) / (double(total) * area);
}

Histogram2D esd_hist(const std::vector<SpectrumSample>& samples,
                     const std::vector<double>& x_edges,
                     const std::vector<double>& y_edges) {
  if (samples.empty()) throw std::domain_error("esd_hist: no samples");
  check_edges(x_edges, "esd_hist");
  check_edges(y_edges, "esd_hist");
  Histogram2D h;
  h.x_edges = x_edges;
  h.y_edges = y_edges;
  h.counts.assign(x_edges.size() - 1, std::vector<long>(y_edges.size() - 1, 0));
  h.n_samples = long(samples.size());
  for (const SpectrumSample& s : samples) {
    for (cd z : s.eigenvalues) {
      int ix = bin_of(x_edges, z.real());
      int iy = bin_of(y_edges, z.imag());
      if (ix < 0 || iy < 0) {
        ++h.out_of_range;
      } else {
        ++h.counts[ix][iy];
        ++h.n_points;
      }
    }
  }
  return h;
}

namespace {

// Shared 1D binning: values per sample, then density and SE assembly.
Marginal1D bin_values(const std::vector<std::vector<double>>& per_sample,
                      const std::vector<double>& edges) {
  Marginal1D m;
  m.edges = edges;
  size_t nb = edges.size() - 1;
  m.counts.assign(nb, 0);
  m.n_samples = long(per_sample.size());
  std::vector<std::vector<long>> sample_counts(per_sample.size(),
                                               std::vector<long>(nb, 0));
  long total = 0;
  for (size_t s = 0; s < per_sample.size(); ++s) {
    total += long(per_sample[s].size());
    for (double v : per_sample[s]) {
      int i = bin_of(edges, v);
      if (i < 0) {
        ++m.out_of_range;
      } else {
        ++sample_counts[s][i];
        ++m.counts[i];
        ++m.n_points;
      }
    }
  }
  m.density.assign(nb, 0.0);
  m.se.assign(nb, 0.0);
  if (total == 0) return m;
  for (size_t i = 0; i < nb; ++i) {
    double w = edges[i + 1] - edges[i];
    m.density[i] = double(m.counts[i]) / (double(total) * w);
    if (per_sample.size() >= 2) {
      // Across-sample spread of per-sample density contributions.
      double mean = 0.0;
      size_t ns = per_sample.size();
      std::vector<double> d(ns);
      for (size_t s = 0; s < ns; ++s) {
        double ts = double(per_sample[s].size());
        d[s] = ts > 0 ? double(sample_counts[s][i]) / (ts * w) : 0.0;
        mean += d[s];
      }
      mean /= double(ns);
      double var = 0.0;
      for (double v : d) var += (v - mean) * (v - mean);
      var /= double(ns - 1);
      m.se[i] = std::sqrt(var / double(ns));
    } else {
      m.se[i] = std::sqrt(double(m.counts[i])) / (double(total) * w);
    }
  }
  return m;
}

}  // namespace

Marginal1D marginal_x(const std::vector<SpectrumSample>& samples,
                      const std::vector<double>& edges) {
  if (samples.empty()) throw std::domain_error("marginal_x: no samples");
  check_edges(edges, "marginal_x");
  std::vector<std::vector<double>> vals(samples.size());
  for (size_t s = 0; s < samples.size(); ++s) {
    vals[s].reserve(samples[s].eigenvalues.size());
    for (cd z : samples[s].eigenvalues) vals[s].push_back(z.real());
  }
  return bin_values(vals, edges);
}

double off_axis_mass(const std::vector<SpectrumSample>& samples, double delta_band) {
  if (!(delta_band > 0.0)) throw std::domain_error("off_axis_mass: delta_band <= 0");
  long total = total_eigenvalues(samples);
  if (total == 0) throw std::domain_error("off_axis_mass: no eigenvalues");
  long off = 0;
  for (const SpectrumSample& s : samples)
    for (cd z : s.eigenvalues)
      if (std::abs(z.imag()) > delta_band) ++off;
  return double(off) / double(total);
}

LocalCorrelationEstimate local_pair_correlation(
    const std::vector<SpectrumSample>& samples, cd center, double scale,
    const std::vector<double>& r_edges, uint64_t bootstrap_seed) {
  if (samples.empty()) throw std::domain_error("local_pair_correlation: no samples");
  check_edges(r_edges, "local_pair_correlation");
  if (!(scale > 0.0) || r_edges.front() < 0.0)
    throw std::domain_error("local_pair_correlation: bad scale or edges");

  const double r_max = r_edges.back();
  const double w_in = r_max;        // pair centers live here
  const double w_out = 2.0 * r_max; // partners (and intensity) live here
  const size_t nb = r_edges.size() - 1;
  const size_t ns = samples.size();

  // Per-sample sufficient statistics, recombined exactly by the bootstrap.
  std::vector<long> win_count(ns, 0), inner_count(ns, 0);
  std::vector<std::vector<long>> pair_count(ns, std::vector<long>(nb, 0));
  long sparse = 0;
  for (size_t s = 0; s < ns; ++s) {
    std::vector<cd> u;
    u.reserve(samples[s].eigenvalues.size());
    for (cd z : samples[s].eigenvalues) {
      cd v = (z - center) * scale;
      if (std::abs(v) <= w_out) u.push_back(v);
    }
    win_count[s] = long(u.size());
    if (u.size() < 2) ++sparse;
    for (size_t i = 0; i < u.size(); ++i) {
      if (std::abs(u[i]) > w_in) continue;
      ++inner_count[s];
      for (size_t j = 0; j < u.size(); ++j) {
        if (j == i) continue;
        int b = bin_of(r_edges, std::abs(u[j] - u[i]));
        if (b >= 0) ++pair_count[s][b];
      }
    }
  }

  auto assemble = [&](const std::vector<size_t>& idx, std::vector<double>& g2) {
    long wins = 0, inner = 0;
    std::vector<long> pairs(nb, 0);
    for (size_t s : idx) {
      wins += win_count[s];
      inner += inner_count[s];
      for (size_t b = 0; b < nb; ++b) pairs[b] += pair_count[s][b];
    }
    double lambda = double(wins) / (double(idx.size()) * M_PI * w_out * w_out);
    g2.assign(nb, 0.0);
    if (inner == 0 || lambda <= 0.0) return;
    for (size_t b = 0; b < nb; ++b) {
      double area = M_PI * (r_edges[b + 1] * r_edges[b + 1] - r_edges[b] * r_edges[b]);
      g2[b] = double(pairs[b]) / (double(inner) * lambda * area);
    }
  };

  LocalCorrelationEstimate est;
  est.center = center;
  est.scale = scale;
  est.r_edges = r_edges;
  std::vector<size_t> all(ns);
  for (size_t s = 0; s < ns; ++s) all[s] = s;
  assemble(all, est.g2);
  long wins = 0;
  for (long c : win_count) wins += c;
  est.intensity = double(wins) / (double(ns) * M_PI * w_out * w_out);
  for (size_t s = 0; s < ns; ++s)
    for (size_t b = 0; b < nb; ++b) est.n_pairs += pair_count[s][b];
  if (sparse * 10 > long(ns))
    est.warning = "local window sparsely populated; is the center inside the support?";

  // Bootstrap over whole spectra.
  const int kResamples = 200;
  std::vector<std::vector<double>> boot(kResamples);
  RngStream rng(bootstrap_seed, 0x10ca1c022);
  std::vector<size_t> idx(ns);
  for (int r = 0; r < kResamples; ++r) {
    for (size_t s = 0; s < ns; ++s)
      idx[s] = size_t(rng.uniform01() * double(ns)) % ns;
    assemble(idx, boot[r]);
  }
  est.se.assign(nb, 0.0);
  for (size_t b = 0; b < nb; ++b) {
    double mean = 0.0;
    for (int r = 0; r < kResamples; ++r) mean += boot[r][b];
    mean /= kResamples;
    double var = 0.0;
    for (int r = 0; r < kResamples; ++r)
      var += (boot[r][b] - mean) * (boot[r][b] - mean);
    est.se[b] = std::sqrt(var / (kResamples - 1));
  }
  return est;
}

Marginal1D weak_profile(const std::vector<SpectrumSample>& samples, double x_center,
                        double alpha, double c, const std::vector<double>& y_edges) {
  if (samples.empty()) throw std::domain_error("weak_profile: no samples");
  check_edges(y_edges, "weak_profile");
  WeakScaling ws = weak_scaling(x_center, alpha, c);
  const double half_window = 0.2 / std::sqrt(c);
  std::vector<std::vector<double>> vals(samples.size());
  long in_window = 0;
  for (size_t s = 0; s < samples.size(); ++s) {
    double local = ws.local_scale(int(samples[s].eigenvalues.size()));
    for (cd z : samples[s].eigenvalues) {
      if (std::abs(z.real() - x_center) > half_window) continue;
      vals[s].push_back(local * z.imag());
      ++in_window;
    }
  }
  if (in_window < 50)
    throw std::runtime_error("weak_profile: only " + std::to_string(in_window) +
                             " eigenvalues in the window around X");
  return bin_values(vals, y_edges);
}

namespace {

GofResult gof_binned(const std::vector<long>& counts,
                     const std::vector<double>& expected_mass) {
  long total = 0;
  for (long c : counts) total += c;
  if (total == 0) throw std::domain_error("gof: empty data");
  double mass = 0.0;
  for (double e : expected_mass) mass += e;
  if (!(mass > 0.0)) throw std::domain_error("gof: analytic density vanishes");

  GofResult g;
  double cum_obs = 0.0, cum_exp = 0.0, chi2 = 0.0;
  int dof = -1;
  for (size_t i = 0; i < counts.size(); ++i) {
    double p_obs = double(counts[i]) / double(total);
    double p_exp = expected_mass[i] / mass;
    cum_obs += p_obs;
    cum_exp += p_exp;
    g.ks = std::max(g.ks, std::abs(cum_obs - cum_exp));
    g.l1 += std::abs(p_obs - p_exp);
    double e = double(total) * p_exp;
    if (e >= 5.0) {
      chi2 += (double(counts[i]) - e) * (double(counts[i]) - e) / e;
      ++dof;
    }
  }
  g.chi2_p = dof >= 1 ? gamma_q(dof / 2.0, cd(chi2 / 2.0, 0.0)).real() : 1.0;
  return g;
}

}  // namespace

GofResult gof(const Marginal1D& m, const std::function<double(double)>& density) {
  std::vector<double> expected(m.counts.size());
  for (size_t i = 0; i < m.counts.size(); ++i) {
    double lo = m.edges[i], hi = m.edges[i + 1];
    expected[i] = std::max(0.0, density(0.5 * (lo + hi))) * (hi - lo);
  }
  return gof_binned(m.counts, expected);
}

GofResult gof(const Histogram2D& h,
              const std::function<double(double, double)>& density) {
  size_t nx = h.x_edges.size() - 1, ny = h.y_edges.size() - 1;
  std::vector<long> counts(nx * ny);
  std::vector<double> expected(nx * ny);
  for (size_t ix = 0; ix < nx; ++ix) {
    for (size_t iy = 0; iy < ny; ++iy) {
      double xc = 0.5 * (h.x_edges[ix] + h.x_edges[ix + 1]);
      double yc = 0.5 * (h.y_edges[iy] + h.y_edges[iy + 1]);
      double area =
          (h.x_edges[ix + 1] - h.x_edges[ix]) * (h.y_edges[iy + 1] - h.y_edges[iy]);
      counts[ix * ny + iy] = h.counts[ix][iy];
      expected[ix * ny + iy] = std::max(0.0, density(xc, yc)) * area;
    }
  }
  GofResult g = gof_binned(counts, expected);
  // Recompute ks on the proper 2D corner CDF rather than the flattened order.
  g.ks = 0.0;
  long total = 0;
  for (long c : counts) total += c;
  double mass = 0.0;
  for (double e : expected) mass += e;
  for (size_t ix = 0; ix < nx; ++ix) {
    for (size_t iy = 0; iy < ny; ++iy) {
      double cum_obs = 0.0, cum_exp = 0.0;
      for (size_t jx = 0; jx <= ix; ++jx) {
        for (size_t jy = 0; jy <= iy; ++jy) {
          cum_obs += double(h.counts[jx][jy]);
          cum_exp += expected[jx * ny + jy];
        }
      }
      g.ks = std::max(g.ks, std::abs(cum_obs / double(total) - cum_exp / mass));
    }
  }
  return g;
}

std::string histogram_csv(const Histogram2D& h) {
  std::ostringstream out;
  out.precision(17);
  out << "x_lo,x_hi,y_lo,y_hi,count,density\n";
  for (size_t ix = 0; ix + 1 < h.x_edges.size(); ++ix)
    for (size_t iy = 0; iy + 1 < h.y_edges.size(); ++iy)
      out << h.x_edges[ix] << ',' << h.x_edges[ix + 1] << ',' << h.y_edges[iy] << ','
          << h.y_edges[iy + 1] << ',' << h.counts[ix][iy] << ','
          << h.density(int(ix), int(iy)) << '\n';
  return out.str();
}

std::string marginal_csv(const Marginal1D& m) {
  std::ostringstream out;
  out.precision(17);
  out << "bin_lo,bin_hi,count,density,se\n";
  for (size_t i = 0; i + 1 < m.edges.size(); ++i)
    out << m.edges[i] << ',' << m.edges[i + 1] << ',' << m.counts[i] << ','
        << m.density[i] << ',' << m.se[i] << '\n';
  return out.str();
}

std::string g2_csv(const LocalCorrelationEstimate& e) {
  std::ostringstream out;
  out.precision(17);
  out << "r_lo,r_hi,g2,se\n";
  for (size_t i = 0; i + 1 < e.r_edges.size(); ++i)
    out << e.r_edges[i] << ',' << e.r_edges[i + 1] << ',' << e.g2[i] << ','
        << e.se[i] << '\n';
  return out.str();
}

std::string gof_json(const GofResult& g) {
  nlohmann::json j;
  j["ks"] = g.ks;
  j["l1"] = g.l1;
  j["chi2_p"] = g.chi2_p;
  return j.dump(2);
}

}  // namespace rmt
