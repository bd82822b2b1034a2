#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rpw/io.hpp"
#include "rpw/metric.hpp"
#include "rpw/parallel.hpp"
#include "rpw/samplers.hpp"

namespace rpw {

inline constexpr int kConvergenceReps = 10;

struct ConvergenceCell {
  std::string metric;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares on (x, y); stderr_ is the usual standard error of
/// the fitted slope.
inline SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  if (n > 2) {
    double rss = 0.0;
    const double intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - intercept - f.slope * x[i];
      rss += r * r;
    }
    f.stderr_ = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

/// Per-(metric, n, seed) distances plus log-log slope fits. Cells hold the
/// mean of exactly kConvergenceReps independent repetitions per (metric, n).
struct ConvergenceReport {
  std::vector<ConvergenceCell> cells;                       // (metric, n, rep) order
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> means;
  std::map<std::string, SlopeFit> slopes;

  double mean_at(const std::string& metric, std::size_t n) const {
    for (const auto& [nn, v] : means.at(metric))
      if (nn == n) return v;
    throw std::invalid_argument("mean_at: unknown n");
  }
};

/// Two independent empirical distributions per repetition; every listed
/// metric evaluated on them at the sampler's ambient diameter. Slopes are
/// fit on (log n, log mean) discarding n < 100.
inline ConvergenceReport convergence_experiment(const SyntheticSampler& sampler,
                                                const std::vector<std::size_t>& n_list,
                                                const std::vector<MetricSpec>& metrics,
                                                std::uint64_t seed, unsigned jobs = 1) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("convergence_experiment: n_list must be ascending");
  if (n_list.empty() || n_list.front() < 1)
    throw std::invalid_argument("convergence_experiment: bad n_list");
  if (n_list.back() > 100000)
    throw std::invalid_argument("convergence_experiment: n capped at 1e5 for the exact solver");

  const double ambient = sampler.ambient_diameter();
  struct Task {
    std::size_t n_idx;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni)
    for (int rep = 0; rep < kConvergenceReps; ++rep) tasks.push_back({ni, rep});

  // values[task][metric]
  std::vector<std::vector<double>> values(tasks.size(),
                                          std::vector<double>(metrics.size(), 0.0));
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const auto [ni, rep] = tasks[t];
    const std::size_t n = n_list[ni];
    // Guard the p = inf flow machinery against oversize graphs; identical
    // supports coalesce far below this in the synthetic settings.
    auto x = sampler.sample(n, mix_seed(seed, ni, 2 * rep)).coalesced();
    auto y = sampler.sample(n, mix_seed(seed, ni, 2 * rep + 1)).coalesced();
    for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
      if (std::isinf(metrics[mi].p) && x.size() * y.size() > kMaxDiscGraphEdges)
        throw std::invalid_argument("convergence_experiment: p = inf flow graph bound exceeded");
      values[t][mi] = evaluate_metric(metrics[mi], x, y, ambient);
    }
  });

  ConvergenceReport report;
  for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
    const std::string name = metrics[mi].name();
    std::vector<double> log_n, log_mean;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      double sum = 0.0;
      for (int rep = 0; rep < kConvergenceReps; ++rep) {
        const std::size_t t = ni * kConvergenceReps + rep;
        report.cells.push_back({name, n_list[ni], mix_seed(seed, ni, 2 * rep), values[t][mi]});
        sum += values[t][mi];
      }
      const double mean = sum / kConvergenceReps;
      report.means[name].emplace_back(n_list[ni], mean);
      if (n_list[ni] >= 100 && mean > 0.0) {
        log_n.push_back(std::log(static_cast<double>(n_list[ni])));
        log_mean.push_back(std::log(mean));
      }
    }
    report.slopes[name] = fit_slope(log_n, log_mean);
  }
  return report;
}

inline void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
  std::ostringstream out;
  out << "metric,n,seed,value\n";
  for (const auto& c : report.cells)
    out << c.metric << "," << c.n << "," << c.seed << "," << fmt_double(c.value) << "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

inline void write_slope_csv(const std::string& path, const ConvergenceReport& report) {
  std::ostringstream out;
  out << "metric,slope,stderr\n";
  for (const auto& [metric, fit] : report.slopes)
    out << metric << "," << fmt_double(fit.slope) << "," << fmt_double(fit.stderr_) << "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

/// Minimal log-log line chart of the per-metric mean curves.
inline void write_convergence_svg(const std::string& path, const ConvergenceReport& report) {
  const double W = 640, H = 480, ml = 60, mr = 20, mt = 20, mb = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [metric, pts] : report.means)
    for (const auto& [n, mean] : pts) {
      if (mean <= 0.0) continue;
      xmin = std::min(xmin, std::log10(static_cast<double>(n)));
      xmax = std::max(xmax, std::log10(static_cast<double>(n)));
      ymin = std::min(ymin, std::log10(mean));
      ymax = std::max(ymax, std::log10(mean));
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto X = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 8) << "\" font-size=\"12\">log10 n</text>\n";
  int ci = 0;
  for (const auto& [metric, pts] : report.means) {
    const char* col = colors[ci % 6];
    out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [n, mean] : pts)
      if (mean > 0.0)
        out << X(std::log10(static_cast<double>(n))) << "," << Y(std::log10(mean)) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << (W - mr - 150) << "\" y=\"" << (mt + 14 + 14 * ci)
        << "\" font-size=\"12\" fill=\"" << col << "\">" << metric << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

/// One contamination level of the outlier study.
struct OutlierRow {
  double delta = 0.0;
  double rpw_clean = 0.0;
  double rpw_contaminated = 0.0;
  double wp_contaminated = 0.0;
  double sandwich_lo = 0.0;     // rpw_clean - delta
  double sandwich_hi = 0.0;     // (1-delta)*rpw_clean + delta
  bool within_sandwich = false;
  double wp_inflation_bound = 0.0;  // delta^{1/p} * W_p(mu, nu')
  double theta_ratio = 0.0;         // rpw_contaminated / min(delta, W_p/k), diagnostic only
};

/// Contaminates nu with delta mass of nu_prime and records how the RPW and
/// the plain W_p react. All distances are computed in the common metric
/// space of the three supports, normalized to unit diameter.
inline std::vector<OutlierRow> outlier_experiment(const DiscreteDistribution& mu,
                                                  const DiscreteDistribution& nu,
                                                  const DiscreteDistribution& nu_prime,
                                                  const std::vector<double>& delta_list,
                                                  double p, double k) {
  if (mu.dimension() != nu.dimension() || mu.dimension() != nu_prime.dimension())
    throw std::invalid_argument("outlier_experiment: dimension mismatch");
  for (double d : delta_list)
    if (d <= 0.0 || d >= 1.0)
      throw std::invalid_argument("outlier_experiment: delta outside (0,1)");
  const DiscreteDistribution* all[] = {&mu, &nu, &nu_prime};
  double diam = union_diameter(std::span<const DiscreteDistribution* const>(all, 3));
  if (diam == 0.0) diam = 1.0;

  const double rpw_clean =
      rpw_distance(mu, nu, cost_matrix(mu, nu, p).normalized_by(diam), k).epsilon;
  const double wp_noise = wasserstein(mu, nu_prime, cost_matrix(mu, nu_prime, p).normalized_by(diam));

  std::vector<OutlierRow> rows;
  for (double d : delta_list) {
    const auto contaminated = mix(nu, nu_prime, d);
    const auto cm = cost_matrix(mu, contaminated, p).normalized_by(diam);
    OutlierRow row;
    row.delta = d;
    row.rpw_clean = rpw_clean;
    row.rpw_contaminated = rpw_distance(mu, contaminated, cm, k).epsilon;
    row.wp_contaminated = wasserstein(mu, contaminated, cm);
    row.sandwich_lo = rpw_clean - d;
    row.sandwich_hi = (1.0 - d) * rpw_clean + d;
    row.within_sandwich = row.rpw_contaminated >= row.sandwich_lo - 1e-7 &&
                          row.rpw_contaminated <= row.sandwich_hi + 1e-7;
    row.wp_inflation_bound = std::pow(d, 1.0 / p) * wp_noise;
    const double denom = std::min(d, row.wp_contaminated / std::max(k, 1e-300));
    row.theta_ratio = denom > 0.0 ? row.rpw_contaminated / denom : 0.0;
    rows.push_back(row);
  }
  return rows;
}

/// Analytic cell-mass function: mass of the reference distribution inside an
/// axis-aligned box [lo, hi).
using CellMassFn = std::function<double(std::span<const double> lo, std::span<const double> hi)>;

/// Uniform distribution on the unit hypercube: cell mass is the clipped
/// overlap volume.
inline CellMassFn uniform_cube_mass() {
  return [](std::span<const double> lo, std::span<const double> hi) {
    double v = 1.0;
    for (std::size_t c = 0; c < lo.size(); ++c)
      v *= std::max(0.0, std::min(hi[c], 1.0) - std::max(lo[c], 0.0));
    return v;
  };
}

struct GridExcess {
  double excess = 0.0;
  double cell_side = 0.0;
  std::size_t cells_per_side = 0;
  bool alpha_trivial = false;  // alpha >= 1/d makes the bound vacuous
};

/// Excess mass of the grid with cell side n^{-alpha}: the total analytic
/// mass that the empirical distribution fails to cover, cell by cell.
inline GridExcess grid_excess(const DiscreteDistribution& samples, double alpha_exp,
                              const CellMassFn& analytic_mass) {
  const std::size_t n = samples.size();
  const std::size_t d = samples.dimension();
  if (n == 0) throw std::invalid_argument("grid_excess: empty sample");
  GridExcess out;
  out.alpha_trivial = alpha_exp >= 1.0 / static_cast<double>(d);
  out.cell_side = std::pow(static_cast<double>(n), -alpha_exp);
  out.cells_per_side =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.0 / out.cell_side - 1e-12)));
  const std::size_t G = out.cells_per_side;

  std::size_t total_cells = 1;
  for (std::size_t c = 0; c < d; ++c) total_cells *= G;
  std::vector<double> counts(total_cells, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = samples.point(i);
    std::size_t idx = 0;
    for (std::size_t c = 0; c < d; ++c) {
      auto cell = static_cast<std::size_t>(pt[c] / out.cell_side);
      if (cell >= G) cell = G - 1;
      idx = idx * G + cell;
    }
    counts[idx] += samples.mass(i);
  }
  std::vector<double> lo(d), hi(d);
  double excess = 0.0;
  for (std::size_t idx = 0; idx < total_cells; ++idx) {
    std::size_t rem = idx;
    for (std::size_t c = d; c-- > 0;) {
      const std::size_t cell = rem % G;
      rem /= G;
      lo[c] = cell * out.cell_side;
      hi[c] = (cell + 1) * out.cell_side;
    }
    excess += std::max(0.0, analytic_mass(lo, hi) - counts[idx]);
  }
  out.excess = excess;
  return out;
}

/// Result of the two-grid transport construction: the mass the plan leaves
/// behind and a diagonal-based upper bound on its w_2 cost.
struct GridTransportBound {
  double untransported = 0.0;
  double cost_bound = 0.0;
  /// Upper bound on the (2,1)-RPW between the reference distribution and
  /// the sample, in the ambient-diameter-normalized metric space.
  double certificate(double ambient_diameter = std::sqrt(2.0)) const {
    return std::max(untransported, cost_bound / ambient_diameter);
  }
};

/// Two aligned grids over the unit square (cell exponents 3/10 and 1/5):
/// transport greedily within fine cells first, then within coarse cells.
/// What remains untransported is exactly the coarse-grid excess; the cost is
/// bounded by per-cell diagonals.
inline GridTransportBound grid_transport_bound(const DiscreteDistribution& samples,
                                               const CellMassFn& analytic_mass) {
  if (samples.dimension() != 2)
    throw std::invalid_argument("grid_transport_bound: needs d = 2");
  const std::size_t n = samples.size();
  const double nd = static_cast<double>(n);
  const std::size_t m2 =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::pow(nd, 0.2) - 1e-12)));
  const std::size_t fine_per_coarse = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::pow(nd, 0.3) / static_cast<double>(m2) - 1e-12)));
  const std::size_t m1 = m2 * fine_per_coarse;  // aligned: each coarse cell splits evenly
  const double s1 = 1.0 / static_cast<double>(m1), s2 = 1.0 / static_cast<double>(m2);

  std::vector<double> fine_counts(m1 * m1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = samples.point(i);
    auto cx = std::min(m1 - 1, static_cast<std::size_t>(pt[0] / s1));
    auto cy = std::min(m1 - 1, static_cast<std::size_t>(pt[1] / s1));
    fine_counts[cx * m1 + cy] += samples.mass(i);
  }
  double mass1 = 0.0;  // transported within fine cells
  std::vector<double> res_mu(m2 * m2, 0.0), res_n(m2 * m2, 0.0);
  double lo[2], hi[2];
  for (std::size_t cx = 0; cx < m1; ++cx)
    for (std::size_t cy = 0; cy < m1; ++cy) {
      lo[0] = cx * s1;
      hi[0] = (cx + 1) * s1;
      lo[1] = cy * s1;
      hi[1] = (cy + 1) * s1;
      const double mu_cell = analytic_mass(std::span<const double>(lo, 2),
                                           std::span<const double>(hi, 2));
      const double n_cell = fine_counts[cx * m1 + cy];
      const double t = std::min(mu_cell, n_cell);
      mass1 += t;
      const std::size_t coarse = (cx / fine_per_coarse) * m2 + (cy / fine_per_coarse);
      res_mu[coarse] += mu_cell - t;
      res_n[coarse] += n_cell - t;
    }
  double mass2 = 0.0;  // residuals transported within coarse cells
  double excess2 = 0.0;
  for (std::size_t c = 0; c < m2 * m2; ++c) {
    mass2 += std::min(res_mu[c], res_n[c]);
    excess2 += std::max(0.0, res_mu[c] - res_n[c]);
  }
  GridTransportBound out;
  out.untransported = excess2;
  out.cost_bound = std::sqrt(mass1 * 2.0 * s1 * s1 + mass2 * 2.0 * s2 * s2);
  return out;
}

/// The reference distribution collapsed onto the coarse-grid cell centers
/// used by grid_transport_bound for the same sample size.
inline DiscreteDistribution discretize_to_coarse_grid(std::size_t n,
                                                      const CellMassFn& analytic_mass) {
  const std::size_t m2 = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.2) - 1e-12)));
  const double s2 = 1.0 / static_cast<double>(m2);
  std::vector<double> coords, masses;
  double lo[2], hi[2];
  for (std::size_t cx = 0; cx < m2; ++cx)
    for (std::size_t cy = 0; cy < m2; ++cy) {
      lo[0] = cx * s2;
      hi[0] = (cx + 1) * s2;
      lo[1] = cy * s2;
      hi[1] = (cy + 1) * s2;
      const double m = analytic_mass(std::span<const double>(lo, 2),
                                     std::span<const double>(hi, 2));
      if (m <= 0.0) continue;
      coords.push_back((cx + 0.5) * s2);
      coords.push_back((cy + 0.5) * s2);
      masses.push_back(m);
    }
  return DiscreteDistribution::from_flat(std::move(coords), std::move(masses), 2);
}

}  // namespace rpw
