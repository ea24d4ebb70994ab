#pragma once

// Full-field reconstruction from point observations: solve the square
// interpolation system Theta a = y - mean[gamma] with Theta = C_gamma Psi_r,
// then expand phi = Psi_r a + mean.

#include "fieldsense/basis.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/types.hpp"

#include <optional>

namespace fieldsense {

/// Theta = rows `placement` of the basis modes, its 2-norm condition number
/// (+inf when singular) and an LU factorization reused for every solve.
class InterpolationSystem {
public:
    InterpolationSystem(const Placement& p, const Basis& b);

    const Matrix& theta() const noexcept { return theta_; }
    double condition_number() const noexcept { return condition_; }
    bool usable() const noexcept { return condition_ <= kConditionLimit; }

    /// Coefficients for one raw observation vector. Throws Numerical when the
    /// system is not usable.
    Vector coefficients(const Vector& y) const;

    /// Coefficients for raw observations stacked as columns, solved as one
    /// block. Faster than per-column solves but not bitwise identical.
    Matrix coefficients_block(const Matrix& y) const;

    const Placement& placement() const noexcept { return placement_; }

private:
    void check_usable() const;

    Placement placement_;
    Matrix theta_;
    Vector mean_at_sensors_;
    double condition_ = kUninformative;
    Eigen::PartialPivLU<Matrix> lu_;
};

InterpolationSystem build_theta(const Placement& p, const Basis& b);

struct SnapshotReconstruction {
    Vector field;        // m
    Vector coefficients; // r
};

SnapshotReconstruction reconstruct_snapshot(const Vector& y, const Placement& p, const Basis& b);

struct ObservationSet {
    Matrix readings; // |placement| x K, raw units
    Placement placement;
};

struct ReconstructionResult {
    Matrix fields;       // m x K
    Matrix coefficients; // r x K
    double condition_number = 1.0;
    std::optional<Vector> per_snapshot_mse;
};

/// Column-wise reconstruction with one factorization; each column goes
/// through the same path as reconstruct_snapshot. When `truth` (m x K) is
/// given, per-snapshot MSE is filled in.
ReconstructionResult reconstruct_series(const ObservationSet& obs, const Basis& b,
                                        const std::optional<Matrix>& truth = std::nullopt);

/// Mean of squared entrywise differences.
double mse(const Matrix& a, const Matrix& b);

} // namespace fieldsense
