#include "fieldsense/reconstruct.hpp"

#include "fieldsense/error.hpp"

#include <string>

namespace fieldsense {

namespace {

double condition_of(const Matrix& theta) {
    if (!theta.allFinite())
        return kUninformative;
    Eigen::JacobiSVD<Matrix> svd(theta);
    const Vector& s = svd.singularValues();
    const double smallest = s[s.size() - 1];
    if (!(smallest > 0.0))
        return kUninformative;
    return s[0] / smallest;
}

} // namespace

InterpolationSystem::InterpolationSystem(const Placement& p, const Basis& b) : placement_(p) {
    p.check_range(b.locations());
    if (p.size() != b.rank())
        fail(ErrorKind::InvalidArgument, "placement size " + std::to_string(p.size()) + " differs from basis rank " +
                                             std::to_string(b.rank()));
    theta_ = sample_rows(b.modes, p);
    mean_at_sensors_ = sample(b.mean.values, p);
    condition_ = condition_of(theta_);
    if (usable())
        lu_.compute(theta_);
}

void InterpolationSystem::check_usable() const {
    if (!usable())
        fail(ErrorKind::Numerical, "interpolation system is singular or ill-conditioned (condition number " +
                                       std::to_string(condition_) + ")");
}

Vector InterpolationSystem::coefficients(const Vector& y) const {
    check_usable();
    if (y.size() != placement_.size())
        fail(ErrorKind::InvalidArgument, "observation length differs from placement size");
    require(y.allFinite(), "observations must be finite");
    return lu_.solve(y - mean_at_sensors_);
}

Matrix InterpolationSystem::coefficients_block(const Matrix& y) const {
    check_usable();
    if (y.rows() != placement_.size())
        fail(ErrorKind::InvalidArgument, "observation rows differ from placement size");
    return lu_.solve(y.colwise() - mean_at_sensors_);
}

InterpolationSystem build_theta(const Placement& p, const Basis& b) { return InterpolationSystem(p, b); }

SnapshotReconstruction reconstruct_snapshot(const Vector& y, const Placement& p, const Basis& b) {
    const InterpolationSystem system(p, b);
    Vector a = system.coefficients(y);
    Vector field = b.modes * a + b.mean.values;
    return {std::move(field), std::move(a)};
}

ReconstructionResult reconstruct_series(const ObservationSet& obs, const Basis& b, const std::optional<Matrix>& truth) {
    const InterpolationSystem system(obs.placement, b);
    require(obs.readings.allFinite(), "observations must be finite");
    if (obs.readings.rows() != obs.placement.size())
        fail(ErrorKind::InvalidArgument, "observation rows differ from placement size");
    const Index k = obs.readings.cols();

    ReconstructionResult out;
    out.condition_number = system.condition_number();
    out.fields.resize(b.locations(), k);
    out.coefficients.resize(b.rank(), k);
    for (Index j = 0; j < k; ++j) {
        Vector a = system.coefficients(obs.readings.col(j));
        out.fields.col(j) = b.modes * a + b.mean.values;
        out.coefficients.col(j) = a;
    }
    if (truth) {
        if (truth->rows() != out.fields.rows() || truth->cols() != k)
            fail(ErrorKind::InvalidArgument, "ground truth shape differs from reconstruction");
        out.per_snapshot_mse = (out.fields - *truth).colwise().squaredNorm().transpose() /
                               static_cast<double>(out.fields.rows());
    }
    return out;
}

double mse(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::InvalidArgument, "mse: shape mismatch");
    require(a.size() > 0, "mse: empty matrices");
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

} // namespace fieldsense
