#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msi/ingest.hpp"

namespace msi::ca {

// Standardized residuals of the correspondence matrix,
//   s_ij = (p_ij - r_i c_j) / sqrt(r_i c_j),   p_ij = y_ij / grand_total.
// Held as an explicit sparse part (p_ij / sqrt(r_i c_j) on the nonzeros of Y)
// minus the implicit rank-one term sqrt(r) * sqrt(c)^T, so S is never
// densified; operator products compose the two parts.
struct Residuals {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<size_t> row_ptr;
  std::vector<uint32_t> col_idx;
  std::vector<double> values;  // p_ij / sqrt(r_i c_j)

  std::vector<double> row_masses;  // r
  std::vector<double> col_masses;  // c
  std::vector<double> sqrt_r;
  std::vector<double> sqrt_c;
  double total_inertia = 0.0;  // sum_ij s_ij^2

  // out = S x (length rows); x length cols.
  void apply(std::span<const double> x, std::span<double> out) const;
  // out = S^T u (length cols); u length rows.
  void apply_transpose(std::span<const double> u, std::span<double> out) const;
  // Dense entry, for tests and small diagnostics.
  double entry(size_t i, size_t j) const;
};

Residuals standardized_residuals(const ingest::BipartiteCounts& counts);

struct CaDecomposition {
  std::vector<double> row_masses;
  std::vector<double> col_masses;
  std::vector<double> singular_values;  // nonincreasing, one per dimension
  std::vector<double> left;             // rows x k, row-major (columns of U)
  std::vector<double> right;            // cols x k, row-major (columns of V)
  double total_inertia = 0.0;
  size_t rows = 0, cols = 0, k = 0;

  double left_at(size_t i, size_t dim) const { return left[i * k + dim]; }
  double right_at(size_t j, size_t dim) const { return right[j * k + dim]; }
};

struct SvdOptions {
  size_t k = 1;
  double tol = 1e-12;     // relative residual target per retained triplet
  size_t max_iter = 1000;
  uint64_t seed = 1;
};

// Top-k singular triplets of S by seeded block subspace iteration on S^T S
// with Rayleigh-Ritz extraction. Deterministic given the seed. Throws
// NumericalError with the residual norm if max_iter passes without
// convergence.
CaDecomposition truncated_svd(const Residuals& s, const SvdOptions& opts);

enum class Convention { standard, paper_literal };

inline const char* convention_name(Convention c) {
  return c == Convention::standard ? "standard" : "paper_literal";
}

// Raw first-dimension user scores before normalization:
//   standard      -> U[i][0] / sqrt(r_i)   (standard row coordinates)
//   paper_literal -> U[i][0] * sqrt(r_i)
std::vector<double> msi_users(const CaDecomposition& dec, Convention conv);

// Affine map to zero mean / unit population standard deviation, then a
// global sign flip so the share-weighted outlet score of `sign_reference`
// is positive. Default reference: outlet with the largest column mass,
// ties lexicographic. Returns the chosen reference through chosen_ref.
std::vector<double> normalize_and_orient(
    std::vector<double> raw, const ingest::BipartiteCounts& counts,
    const std::optional<std::string>& sign_reference, std::string* chosen_ref);

// MSI_j = sum_i y_ij MSI_i / sum_i y_ij (share-weighted mean of user scores).
std::vector<double> msi_outlets(std::span<const double> user_msi,
                                const ingest::BipartiteCounts& counts);

struct MsiScores {
  std::vector<std::string> user_ids;
  std::vector<double> user_msi;
  std::vector<std::string> outlet_ids;
  std::vector<double> outlet_msi;
  std::vector<double> column_mass;
  std::string sign_reference;
};

struct MsiOptions {
  Convention convention = Convention::standard;
  std::optional<std::string> sign_reference;
  SvdOptions svd;
};

// Full chain: residuals -> truncated SVD -> user scores -> normalization ->
// outlet scores.
MsiScores compute_msi(const ingest::BipartiteCounts& counts,
                      const MsiOptions& opts, CaDecomposition* dec_out = nullptr);

}  // namespace msi::ca
