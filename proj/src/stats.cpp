#include "msi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msi/common.hpp"
#include "msi/kernels.hpp"
#include "msi/parallel.hpp"
#include "msi/rng.hpp"

namespace msi::stats {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399;

// Touch points (ascending indices) of the greatest convex minorant of the
// empirical CDF on [lo, hi], treating the step at x[i] as count i -> i+1.
// The minorant touches the lower corner (x[i], i). Pops on equal slopes, so
// consecutive touch points have strictly increasing x except for vertical
// runs ending at hi, which the gap evaluation guards against.
void convex_minorant(const double* x, int lo, int hi, std::vector<int>& out) {
  out.clear();
  for (int i = lo; i <= hi; ++i) {
    while (out.size() >= 2) {
      int b = out[out.size() - 1], a = out[out.size() - 2];
      // pop b when slope(a->b) >= slope(b->i)
      if ((x[i] - x[b]) * double(b - a) >= (x[b] - x[a]) * double(i - b))
        out.pop_back();
      else
        break;
    }
    out.push_back(i);
  }
}

// Touch points of the least concave majorant; touches upper corners
// (x[i], i + 1).
void concave_majorant(const double* x, int lo, int hi, std::vector<int>& out) {
  out.clear();
  for (int i = lo; i <= hi; ++i) {
    while (out.size() >= 2) {
      int b = out[out.size() - 1], a = out[out.size() - 2];
      // pop b when slope(a->b) <= slope(b->i)
      if ((x[i] - x[b]) * double(b - a) <= (x[b] - x[a]) * double(i - b))
        out.pop_back();
      else
        break;
    }
    out.push_back(i);
  }
}

}  // namespace

double dip_sorted(std::span<const double> sorted) {
  const int n = int(sorted.size());
  if (n < 4) throw DataError("dip: sample size must be >= 4");
  const double* x = sorted.data();
  for (int i = 1; i < n; ++i)
    if (x[i] < x[i - 1]) throw DataError("dip: sample is not sorted");

  if (x[n - 1] == x[0]) return 1.0 / (2.0 * n);  // point mass

  int low = 0, high = n - 1;
  double best = 1.0;  // in count units; >= one step height by construction

  std::vector<int> gcm, lcm;
  for (;;) {
    convex_minorant(x, low, high, gcm);
    concave_majorant(x, low, high, lcm);

    // Largest vertical gap between the two curves, evaluated at the touch
    // points of either curve against the opposite curve's segment. Ties go
    // to the later (higher) location, matching the reference algorithm.
    double d = 0.0;
    int new_low = low, new_high = high;
    {
      size_t ia = 0;  // gcm segment cursor for lcm points
      for (size_t s = 0; s < lcm.size(); ++s) {
        const int p = lcm[s];
        while (ia + 2 < gcm.size() && gcm[ia + 1] < p) ++ia;
        const int glo = gcm[ia], ghi = gcm[ia + 1 < gcm.size() ? ia + 1 : ia];
        double gap;
        if (p == glo || p == ghi) {
          gap = 1.0;
        } else if (x[ghi] == x[glo]) {
          gap = double(p + 1 - glo);
        } else {
          const double line =
              glo + (x[p] - x[glo]) * double(ghi - glo) / (x[ghi] - x[glo]);
          gap = double(p + 1) - line;
        }
        if (gap >= d) {
          d = gap;
          new_low = glo;
          new_high = p;
        }
      }
      size_t ib = 0;  // lcm segment cursor for gcm points
      for (size_t s = 0; s < gcm.size(); ++s) {
        const int p = gcm[s];
        while (ib + 2 < lcm.size() && lcm[ib + 1] < p) ++ib;
        const int slo = lcm[ib], shi = lcm[ib + 1 < lcm.size() ? ib + 1 : ib];
        double gap;
        if (p == slo || p == shi) {
          gap = 1.0;
        } else if (x[shi] == x[slo]) {
          gap = double(shi + 1 - p);
        } else {
          const double line = (slo + 1) +
                              (x[p] - x[slo]) * double(shi - slo) / (x[shi] - x[slo]);
          gap = line - double(p);
        }
        if (gap >= d) {
          d = gap;
          new_low = p;
          new_high = shi;
        }
      }
    }

    if (d <= best) break;

    // Deviation of the empirical CDF above the convex fit on [low, new_low].
    double dip_l = 0.0;
    for (size_t s = 0; s + 1 < gcm.size() && gcm[s] < new_low; ++s) {
      const int jb = gcm[s], je = gcm[s + 1];
      double max_t = 1.0;
      if (je - jb > 1 && x[je] != x[jb]) {
        const double c = double(je - jb) / (x[je] - x[jb]);
        for (int jj = jb; jj <= je; ++jj) {
          const double t = double(jj - jb + 1) - (x[jj] - x[jb]) * c;
          if (t > max_t) max_t = t;
        }
      }
      if (max_t > dip_l) dip_l = max_t;
    }

    // Deviation below the concave fit on [new_high, high].
    double dip_u = 0.0;
    for (size_t s = 0; s + 1 < lcm.size(); ++s) {
      if (lcm[s] < new_high) continue;
      const int jb = lcm[s], je = lcm[s + 1];
      double max_t = 1.0;
      if (je - jb > 1 && x[je] != x[jb]) {
        const double c = double(je - jb) / (x[je] - x[jb]);
        for (int jj = jb; jj <= je; ++jj) {
          const double t = (x[jj] - x[jb]) * c - double(jj - jb - 1);
          if (t > max_t) max_t = t;
        }
      }
      if (max_t > dip_u) dip_u = max_t;
    }

    best = std::max(best, std::max(dip_l, dip_u));
    low = new_low;
    high = new_high;
    if (best >= d) break;
  }

  return best / (2.0 * n);
}

double dip_statistic(std::span<const double> sample) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return dip_sorted(sorted);
}

DipResult dip_pvalue(std::span<const double> sample, size_t B, uint64_t seed) {
  if (B < 100) throw DataError("dip_pvalue: need at least 100 replicates");
  const size_t n = sample.size();
  const double observed = dip_statistic(sample);

  const size_t chunk = std::max<size_t>(1, (B + 63) / 64);
  const size_t n_chunks = (B + chunk - 1) / chunk;
  std::vector<size_t> exceed(n_chunks, 0);
  parallel_chunks(B, chunk, [&](size_t c, size_t begin, size_t end) {
    size_t count = 0;
    for (size_t b = begin; b < end; ++b) {
      Rng rng(Rng::mix(seed, b));
      std::vector<double> u = sorted_uniform_sample(rng, n);
      if (dip_sorted(u) >= observed) ++count;
    }
    exceed[c] = count;
  });
  size_t total = 0;
  for (size_t c : exceed) total += c;

  DipResult res;
  res.n = n;
  res.dip = observed;
  res.p_value = double(1 + total) / double(B + 1);
  res.replicates = B;
  res.seed = seed;
  return res;
}

std::vector<double> default_grid(std::span<const double> sample,
                                 double bandwidth, size_t points) {
  if (sample.empty()) throw DataError("default_grid: empty sample");
  if (points < 2) throw DataError("default_grid: need at least 2 grid points");
  auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *mn - 4.0 * bandwidth;
  const double hi = *mx + 4.0 * bandwidth;
  std::vector<double> grid(points);
  const double step = (hi - lo) / double(points - 1);
  for (size_t i = 0; i < points; ++i) grid[i] = lo + step * double(i);
  grid.back() = hi;
  return grid;
}

namespace {

void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw DataError(std::string(what) + ": empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw DataError(std::string(what) + ": grid must be strictly ascending");
}

}  // namespace

DensityCurve kde_1d(std::span<const double> sample, double bandwidth,
                    std::vector<double> grid) {
  if (sample.empty()) throw DataError("kde_1d: empty sample");
  if (!(bandwidth > 0.0)) throw DataError("kde_1d: bandwidth must be > 0");
  check_grid(grid, "kde_1d");

  DensityCurve curve;
  curve.bandwidth = bandwidth;
  curve.density.assign(grid.size(), 0.0);
  const double inv_h = 1.0 / bandwidth;
  const double norm = kInvSqrt2Pi * inv_h / double(sample.size());
  const auto& k = kernels::active();

  parallel_chunks(grid.size(), 64, [&](size_t, size_t begin, size_t end) {
    for (size_t g = begin; g < end; ++g)
      curve.density[g] =
          norm * k.gauss_sum(sample.data(), sample.size(), grid[g], inv_h);
  });
  curve.grid = std::move(grid);
  return curve;
}

DensityGrid kde_2d(std::span<const double> x, std::span<const double> y,
                   double bandwidth_x, double bandwidth_y,
                   std::vector<double> x_grid, std::vector<double> y_grid) {
  if (x.size() != y.size()) throw DataError("kde_2d: x/y length mismatch");
  if (x.empty()) throw DataError("kde_2d: empty sample");
  if (!(bandwidth_x > 0.0) || !(bandwidth_y > 0.0))
    throw DataError("kde_2d: bandwidths must be > 0");
  check_grid(x_grid, "kde_2d");
  check_grid(y_grid, "kde_2d");

  const size_t nx = x_grid.size(), ny = y_grid.size(), n = x.size();
  const double inv_hx = 1.0 / bandwidth_x, inv_hy = 1.0 / bandwidth_y;
  const auto& k = kernels::active();

  const size_t chunk = default_chunk(n);
  const size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(n_chunks);
  parallel_chunks(n, chunk, [&](size_t c, size_t begin, size_t end) {
    auto& acc = partial[c];
    acc.assign(nx * ny, 0.0);
    std::vector<double> wx(nx), wy(ny);
    for (size_t i = begin; i < end; ++i) {
      k.gauss_weights(x_grid.data(), nx, x[i], inv_hx, wx.data());
      k.gauss_weights(y_grid.data(), ny, y[i], inv_hy, wy.data());
      for (size_t ix = 0; ix < nx; ++ix)
        if (wx[ix] != 0.0) k.axpy(wx[ix], wy.data(), acc.data() + ix * ny, ny);
    }
  });

  DensityGrid grid;
  grid.bandwidth_x = bandwidth_x;
  grid.bandwidth_y = bandwidth_y;
  grid.density.assign(nx * ny, 0.0);
  for (const auto& acc : partial)
    for (size_t i = 0; i < nx * ny; ++i) grid.density[i] += acc[i];
  // grouped so that swapping (x, y) multiplies the same two factors, keeping
  // the transpose symmetry bitwise exact
  const double norm =
      (kInvSqrt2Pi * inv_hx) * (kInvSqrt2Pi * inv_hy) / double(n);
  for (double& v : grid.density) v *= norm;
  grid.x_grid = std::move(x_grid);
  grid.y_grid = std::move(y_grid);
  return grid;
}

double trapezoid_integral(std::span<const double> grid,
                          std::span<const double> values) {
  double acc = 0.0;
  for (size_t i = 1; i < grid.size(); ++i)
    acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  return acc;
}

}  // namespace msi::stats
