#include "msi/ca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msi/common.hpp"
#include "msi/kernels.hpp"
#include "msi/parallel.hpp"
#include "msi/rng.hpp"

namespace msi::ca {

namespace {

// Sequential reduction over fixed-size chunks keeps results identical for
// any thread count.
void chunked_rows(size_t rows, const std::function<void(size_t, size_t, size_t)>& fn) {
  parallel_chunks(rows, default_chunk(rows), fn);
}

}  // namespace

void Residuals::apply(std::span<const double> x, std::span<double> out) const {
  const auto& k = kernels::active();
  const double cx = k.dot(sqrt_c.data(), x.data(), cols);
  chunked_rows(rows, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      double acc = 0.0;
      for (size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        acc += values[p] * x[col_idx[p]];
      out[i] = acc - sqrt_r[i] * cx;
    }
  });
}

void Residuals::apply_transpose(std::span<const double> u,
                                std::span<double> out) const {
  const auto& k = kernels::active();
  const double ru = k.dot(sqrt_r.data(), u.data(), rows);

  const size_t chunk = default_chunk(rows);
  const size_t n_chunks = rows == 0 ? 0 : (rows + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(n_chunks);
  parallel_chunks(rows, chunk, [&](size_t c, size_t begin, size_t end) {
    auto& acc = partial[c];
    acc.assign(cols, 0.0);
    for (size_t i = begin; i < end; ++i)
      for (size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        acc[col_idx[p]] += values[p] * u[i];
  });
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& acc : partial)
    for (size_t j = 0; j < cols; ++j) out[j] += acc[j];
  for (size_t j = 0; j < cols; ++j) out[j] -= sqrt_c[j] * ru;
}

double Residuals::entry(size_t i, size_t j) const {
  double v = 0.0;
  for (size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
    if (col_idx[p] == j) v = values[p];
  return v - sqrt_r[i] * sqrt_c[j];
}

Residuals standardized_residuals(const ingest::BipartiteCounts& counts) {
  Residuals s;
  s.rows = counts.rows();
  s.cols = counts.cols();
  s.row_ptr = counts.row_ptr;
  s.col_idx = counts.col_idx;

  const double inv_total = 1.0 / double(counts.grand_total);
  auto rs = counts.row_sums();
  auto cs = counts.col_sums();
  s.row_masses.resize(s.rows);
  s.col_masses.resize(s.cols);
  for (size_t i = 0; i < s.rows; ++i) {
    if (rs[i] == 0) throw DataError("standardized_residuals: empty user row");
    s.row_masses[i] = double(rs[i]) * inv_total;
  }
  for (size_t j = 0; j < s.cols; ++j) {
    if (cs[j] == 0) throw DataError("standardized_residuals: empty outlet column");
    s.col_masses[j] = double(cs[j]) * inv_total;
  }
  s.sqrt_r.resize(s.rows);
  s.sqrt_c.resize(s.cols);
  for (size_t i = 0; i < s.rows; ++i) s.sqrt_r[i] = std::sqrt(s.row_masses[i]);
  for (size_t j = 0; j < s.cols; ++j) s.sqrt_c[j] = std::sqrt(s.col_masses[j]);

  s.values.resize(counts.counts.size());
  double inertia = 0.0;
  for (size_t i = 0; i < s.rows; ++i) {
    double nz_colmass = 0.0;
    for (size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
      const size_t j = s.col_idx[p];
      const double p_ij = double(counts.counts[p]) * inv_total;
      s.values[p] = p_ij / (s.sqrt_r[i] * s.sqrt_c[j]);
      const double s_ij = s.values[p] - s.sqrt_r[i] * s.sqrt_c[j];
      inertia += s_ij * s_ij;
      nz_colmass += s.col_masses[j];
    }
    // structural zeros of row i contribute r_i c_j each
    inertia += s.row_masses[i] * (1.0 - nz_colmass);
  }
  s.total_inertia = inertia;
  return s;
}

namespace {

// Modified Gram-Schmidt on the columns of a (cols x b) row-major block.
// Rank-deficient columns are refilled from the generator and re-reduced,
// so the result is always a full orthonormal block, deterministically.
void orthonormalize(std::vector<double>& block, size_t n, size_t b, Rng& rng) {
  auto col = [&](size_t c, size_t row) -> double& { return block[row * b + c]; };
  for (size_t c = 0; c < b; ++c) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (size_t prev = 0; prev < c; ++prev) {
        double d = 0.0;
        for (size_t i = 0; i < n; ++i) d += col(prev, i) * col(c, i);
        for (size_t i = 0; i < n; ++i) col(c, i) -= d * col(prev, i);
      }
      double norm = 0.0;
      for (size_t i = 0; i < n; ++i) norm += col(c, i) * col(c, i);
      norm = std::sqrt(norm);
      if (norm > 1e-150) {
        for (size_t i = 0; i < n; ++i) col(c, i) /= norm;
        break;
      }
      for (size_t i = 0; i < n; ++i) col(c, i) = rng.normal();
    }
  }
}

// Cyclic Jacobi eigensolver for a small symmetric matrix (b <= ~20).
// Eigenvalues descending; eigenvectors in the columns of V (row-major b x b).
void jacobi_eigh(std::vector<double> a, size_t b, std::vector<double>& evals,
                 std::vector<double>& evecs) {
  evecs.assign(b * b, 0.0);
  for (size_t i = 0; i < b; ++i) evecs[i * b + i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < b; ++p)
      for (size_t q = p + 1; q < b; ++q) off += a[p * b + q] * a[p * b + q];
    if (off < 1e-30) break;
    for (size_t p = 0; p < b; ++p) {
      for (size_t q = p + 1; q < b; ++q) {
        const double apq = a[p * b + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[p * b + p], aqq = a[q * b + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (size_t i = 0; i < b; ++i) {
          const double aip = a[i * b + p], aiq = a[i * b + q];
          a[i * b + p] = cs * aip - sn * aiq;
          a[i * b + q] = sn * aip + cs * aiq;
        }
        for (size_t i = 0; i < b; ++i) {
          const double api = a[p * b + i], aqi = a[q * b + i];
          a[p * b + i] = cs * api - sn * aqi;
          a[q * b + i] = sn * api + cs * aqi;
        }
        for (size_t i = 0; i < b; ++i) {
          const double vip = evecs[i * b + p], viq = evecs[i * b + q];
          evecs[i * b + p] = cs * vip - sn * viq;
          evecs[i * b + q] = sn * vip + cs * viq;
        }
      }
    }
  }

  std::vector<size_t> order(b);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(b);
  for (size_t i = 0; i < b; ++i) diag[i] = a[i * b + i];
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return diag[x] > diag[y]; });
  evals.resize(b);
  std::vector<double> sorted(b * b);
  for (size_t c = 0; c < b; ++c) {
    evals[c] = diag[order[c]];
    for (size_t i = 0; i < b; ++i) sorted[i * b + c] = evecs[i * b + order[c]];
  }
  evecs.swap(sorted);
}

}  // namespace

CaDecomposition truncated_svd(const Residuals& s, const SvdOptions& opts) {
  const size_t rows = s.rows, cols = s.cols;
  if (opts.k < 1) throw DataError("truncated_svd: k must be >= 1");
  if (opts.k > std::min(rows, cols) - 1)
    throw DataError("truncated_svd: k exceeds min(rows, cols) - 1");

  const size_t k = opts.k;
  const size_t b = std::min(cols, k + 4);  // oversampled block
  Rng rng(opts.seed);

  // V block: cols x b, row-major.
  std::vector<double> v(cols * b);
  for (double& x : v) x = rng.normal();
  orthonormalize(v, cols, b, rng);

  std::vector<double> w(cols * b), tmp_row(rows), tmp_col(cols), vcol(cols);
  std::vector<double> m(b * b), evals, evecs;
  std::vector<double> ritz(cols * b);
  double worst_residual = 0.0;

  for (size_t iter = 0; iter < opts.max_iter; ++iter) {
    // w = (S^T S) v, one column at a time.
    for (size_t c = 0; c < b; ++c) {
      for (size_t i = 0; i < cols; ++i) vcol[i] = v[i * b + c];
      s.apply(vcol, tmp_row);
      s.apply_transpose(tmp_row, tmp_col);
      for (size_t i = 0; i < cols; ++i) w[i * b + c] = tmp_col[i];
    }
    // m = v^T w  (symmetric Rayleigh quotient).
    for (size_t p = 0; p < b; ++p)
      for (size_t q = 0; q < b; ++q) {
        double acc = 0.0;
        for (size_t i = 0; i < cols; ++i) acc += v[i * b + p] * w[i * b + q];
        m[p * b + q] = acc;
      }
    for (size_t p = 0; p < b; ++p)  // symmetrize against roundoff
      for (size_t q = p + 1; q < b; ++q) {
        double avg = 0.5 * (m[p * b + q] + m[q * b + p]);
        m[p * b + q] = m[q * b + p] = avg;
      }
    jacobi_eigh(m, b, evals, evecs);

    // Ritz vectors x_l = V z_l; residual r_l = W z_l - lambda_l x_l.
    const double scale = std::max(evals.empty() ? 0.0 : std::abs(evals[0]), 0.0);
    worst_residual = 0.0;
    for (size_t l = 0; l < k; ++l) {
      double rnorm = 0.0;
      for (size_t i = 0; i < cols; ++i) {
        double xi = 0.0, wi = 0.0;
        for (size_t c = 0; c < b; ++c) {
          xi += v[i * b + c] * evecs[c * b + l];
          wi += w[i * b + c] * evecs[c * b + l];
        }
        ritz[i * b + l] = xi;
        const double r = wi - evals[l] * xi;
        rnorm += r * r;
      }
      worst_residual = std::max(worst_residual, std::sqrt(rnorm));
    }
    for (size_t l = k; l < b; ++l)
      for (size_t i = 0; i < cols; ++i) {
        double xi = 0.0;
        for (size_t c = 0; c < b; ++c) xi += v[i * b + c] * evecs[c * b + l];
        ritz[i * b + l] = xi;
      }

    if (worst_residual <= opts.tol * scale + 1e-300) {
      CaDecomposition dec;
      dec.rows = rows;
      dec.cols = cols;
      dec.k = k;
      dec.row_masses = s.row_masses;
      dec.col_masses = s.col_masses;
      dec.total_inertia = s.total_inertia;
      dec.singular_values.resize(k);
      dec.right.assign(cols * k, 0.0);
      dec.left.assign(rows * k, 0.0);
      for (size_t l = 0; l < k; ++l) {
        const double alpha = std::sqrt(std::max(evals[l], 0.0));
        dec.singular_values[l] = alpha;
        for (size_t j = 0; j < cols; ++j) dec.right[j * k + l] = ritz[j * b + l];
        if (alpha > 1e-150) {
          for (size_t j = 0; j < cols; ++j) vcol[j] = ritz[j * b + l];
          s.apply(vcol, tmp_row);
          for (size_t i = 0; i < rows; ++i) dec.left[i * k + l] = tmp_row[i] / alpha;
        }
      }
      return dec;
    }

    // Next subspace: orthonormalized W rotated into Ritz order, which keeps
    // the leading columns aligned with the dominant directions.
    for (size_t i = 0; i < cols; ++i)
      for (size_t l = 0; l < b; ++l) {
        double wi = 0.0;
        for (size_t c = 0; c < b; ++c) wi += w[i * b + c] * evecs[c * b + l];
        v[i * b + l] = wi;
      }
    orthonormalize(v, cols, b, rng);
  }

  throw NumericalError(
      "truncated_svd: no convergence after " + std::to_string(opts.max_iter) +
          " iterations (residual " + std::to_string(worst_residual) + ")",
      worst_residual);
}

std::vector<double> msi_users(const CaDecomposition& dec, Convention conv) {
  if (dec.k < 1) throw DataError("msi_users: decomposition has no dimensions");
  if (!(dec.singular_values[0] > 0.0))
    throw NumericalError("msi_users: no leading dimension: table is independent");
  std::vector<double> raw(dec.rows);
  for (size_t i = 0; i < dec.rows; ++i) {
    const double sr = std::sqrt(dec.row_masses[i]);
    raw[i] = conv == Convention::standard ? dec.left_at(i, 0) / sr
                                          : dec.left_at(i, 0) * sr;
  }
  return raw;
}

std::vector<double> normalize_and_orient(
    std::vector<double> raw, const ingest::BipartiteCounts& counts,
    const std::optional<std::string>& sign_reference, std::string* chosen_ref) {
  const size_t n = raw.size();
  if (n != counts.rows())
    throw DataError("normalize_and_orient: score/user count mismatch");
  const auto& k = kernels::active();
  const double mean = k.sum(raw.data(), n) / double(n);
  const double var = k.sum_sq_dev(raw.data(), n, mean) / double(n);
  if (!(var > 0.0))
    throw NumericalError("normalize_and_orient: constant score vector");
  k.shift_scale(raw.data(), n, -mean, 1.0 / std::sqrt(var));

  uint32_t ref_col = 0;
  if (sign_reference.has_value()) {
    auto it = counts.outlet_index.find(*sign_reference);
    if (it == counts.outlet_index.end())
      throw DataError("normalize_and_orient: unknown sign reference outlet: " +
                      *sign_reference);
    ref_col = it->second;
  } else {
    auto cs = counts.col_sums();
    uint64_t best = 0;
    for (uint32_t j = 0; j < counts.cols(); ++j) {
      if (cs[j] > best ||
          (cs[j] == best && counts.outlet_ids[j] < counts.outlet_ids[ref_col])) {
        best = cs[j];
        ref_col = j;
      }
    }
  }
  if (chosen_ref) *chosen_ref = counts.outlet_ids[ref_col];

  double weighted = 0.0, weight = 0.0;
  for (size_t i = 0; i < counts.rows(); ++i)
    for (size_t p = counts.row_ptr[i]; p < counts.row_ptr[i + 1]; ++p)
      if (counts.col_idx[p] == ref_col) {
        weighted += double(counts.counts[p]) * raw[i];
        weight += double(counts.counts[p]);
      }
  if (weighted < 0.0)
    for (double& x : raw) x = -x;
  return raw;
}

std::vector<double> msi_outlets(std::span<const double> user_msi,
                                const ingest::BipartiteCounts& counts) {
  if (user_msi.size() != counts.rows())
    throw DataError("msi_outlets: score/user count mismatch");
  std::vector<double> num(counts.cols(), 0.0), den(counts.cols(), 0.0);
  for (size_t i = 0; i < counts.rows(); ++i)
    for (size_t p = counts.row_ptr[i]; p < counts.row_ptr[i + 1]; ++p) {
      num[counts.col_idx[p]] += double(counts.counts[p]) * user_msi[i];
      den[counts.col_idx[p]] += double(counts.counts[p]);
    }
  std::vector<double> out(counts.cols());
  for (size_t j = 0; j < counts.cols(); ++j) out[j] = num[j] / den[j];
  return out;
}

MsiScores compute_msi(const ingest::BipartiteCounts& counts,
                      const MsiOptions& opts, CaDecomposition* dec_out) {
  Residuals s = standardized_residuals(counts);
  CaDecomposition dec = truncated_svd(s, opts.svd);
  std::vector<double> raw = msi_users(dec, opts.convention);

  MsiScores scores;
  scores.user_msi = normalize_and_orient(std::move(raw), counts,
                                         opts.sign_reference,
                                         &scores.sign_reference);
  scores.outlet_msi = msi_outlets(scores.user_msi, counts);
  scores.user_ids = counts.user_ids;
  scores.outlet_ids = counts.outlet_ids;
  scores.column_mass = s.col_masses;
  if (dec_out) *dec_out = std::move(dec);
  return scores;
}

}  // namespace msi::ca
