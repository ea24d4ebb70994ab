#pragma once

// Truncated SVD basis of mean-centered snapshot data and rank selection by
// singular value hard thresholding (SVHT).

#include "fieldsense/fielddata.hpp"
#include "fieldsense/types.hpp"

#include <filesystem>
#include <optional>

namespace fieldsense {

/// Centered data = left_modes * diag(singular_values) * right_modes^T, with
/// p = min(m, M) columns. Each left mode has its largest-magnitude entry
/// positive (first such entry on ties), which makes the factors unique for
/// distinct singular values.
struct SvdFactorization {
    Matrix left_modes;      // m x p
    Vector singular_values; // p, non-increasing
    Matrix right_modes;     // M x p
    MeanVector mean;

    Index rank_capacity() const noexcept { return singular_values.size(); }
};

/// Rank-r slice of a factorization. `right_modes` may be empty (0 x r) for a
/// basis loaded without temporal modes; everything except state-space
/// fitting works without them.
struct Basis {
    Matrix modes;           // m x r, orthonormal columns
    Vector singular_values; // r
    Matrix right_modes;     // M x r or 0 x r
    MeanVector mean;        // m

    Index rank() const noexcept { return modes.cols(); }
    Index locations() const noexcept { return modes.rows(); }

    /// Throws InvalidArgument when shapes disagree or modes are not
    /// orthonormal to 1e-8.
    void validate() const;
};

SvdFactorization compute_svd(const TrainingSet& ts);

Basis truncate(const SvdFactorization& f, Index r);

/// Known-noise threshold coefficient lambda(beta); equals 4/sqrt(3) at beta = 1.
double svht_lambda(double beta);

/// Polynomial approximation of the unknown-noise coefficient omega(beta).
double svht_omega(double beta);

/// Threshold applied by svht_rank, before the numerical-rank floor.
double svht_threshold(const SvdFactorization& f, std::optional<double> noise_std);

/// Number of singular values strictly above the SVHT threshold (known noise
/// when noise_std is given, median-based otherwise). Values at or below the
/// numerical-rank floor max(m, M) * eps * sigma_1 never count. Returns at
/// least 1.
Index svht_rank(const SvdFactorization& f, std::optional<double> noise_std = std::nullopt);

/// MSE over every entry between ts and its orthogonal projection onto the
/// affine subspace mean + span(modes).
double projection_error(const Basis& b, const TrainingSet& ts);

/// Writes modes as a matrix file, the sidecar ("r=", "sigma=", "mean=") and,
/// when the basis carries them, right modes as a second matrix file.
void save_basis(const Basis& b, const std::filesystem::path& modes_path, const std::filesystem::path& sidecar_path,
                const std::optional<std::filesystem::path>& right_modes_path = std::nullopt);

Basis load_basis(const std::filesystem::path& modes_path, const std::filesystem::path& sidecar_path,
                 const std::optional<std::filesystem::path>& right_modes_path = std::nullopt);

} // namespace fieldsense
