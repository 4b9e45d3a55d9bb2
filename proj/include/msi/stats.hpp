#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace msi::stats {

// Hartigan & Hartigan (1985) dip statistic: the largest distance between
// the empirical CDF and the closest unimodal CDF, computed by iterating
// greatest-convex-minorant / least-concave-majorant fits over a shrinking
// modal interval. Requires n >= 4. Range [1/(2n), 0.25].
double dip_statistic(std::span<const double> sample);

// Same, but the caller guarantees `sorted` is ascending.
double dip_sorted(std::span<const double> sorted);

struct DipResult {
  size_t n = 0;
  double dip = 0.0;
  double p_value = 1.0;
  size_t replicates = 0;
  uint64_t seed = 0;
};

// Monte Carlo p-value against the uniform(0,1) null of the same sample size:
//   p = (1 + #{b : dip(U_b) >= dip(sample)}) / (B + 1).
// Replicates use per-index derived seeds, so the result is independent of
// the thread count. B >= 100 required.
DipResult dip_pvalue(std::span<const double> sample, size_t B, uint64_t seed);

struct DensityCurve {
  std::vector<double> grid;     // ascending
  std::vector<double> density;  // >= 0
  double bandwidth = 0.0;
};

// Gaussian kernel density on `grid`:
//   f(g) = (1/(n h)) sum_i phi((g - x_i)/h).
DensityCurve kde_1d(std::span<const double> sample, double bandwidth,
                    std::vector<double> grid);

// Default evaluation grid: `points` equispaced values on
// [min - 4h, max + 4h].
std::vector<double> default_grid(std::span<const double> sample,
                                 double bandwidth, size_t points = 512);

struct DensityGrid {
  std::vector<double> x_grid;
  std::vector<double> y_grid;
  std::vector<double> density;  // row-major: density[ix * ny + iy]
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;

  double at(size_t ix, size_t iy) const { return density[ix * y_grid.size() + iy]; }
};

// Product-Gaussian-kernel joint density over the grid, accumulated as one
// rank-1 weight outer product per sample.
DensityGrid kde_2d(std::span<const double> x, std::span<const double> y,
                   double bandwidth_x, double bandwidth_y,
                   std::vector<double> x_grid, std::vector<double> y_grid);

double trapezoid_integral(std::span<const double> grid,
                          std::span<const double> values);

}  // namespace msi::stats
