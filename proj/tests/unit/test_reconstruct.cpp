#include <doctest.h>

#include "fieldsense/error.hpp"
#include "fieldsense/reconstruct.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace fieldsense;

namespace {

Basis single_mode() {
    Matrix psi(2, 1);
    psi << 0.6, 0.8;
    return testing::basis_from_modes(psi);
}

} // namespace

TEST_CASE("build_theta") {
    Matrix modes = Matrix::Zero(5, 2);
    modes(1, 0) = 1.0;
    modes(3, 1) = 1.0;
    const Basis b = testing::basis_from_modes(modes);
    const InterpolationSystem id = build_theta(Placement({1, 3}), b);
    CHECK(id.theta() == Matrix::Identity(2, 2));
    CHECK(id.condition_number() == doctest::Approx(1.0));

    const InterpolationSystem singular = build_theta(Placement({1, 0}), b);
    CHECK(std::isinf(singular.condition_number()));
    CHECK_FALSE(singular.usable());

    const Basis rb = testing::basis_from_modes(testing::random_orthonormal(10, 3, 8));
    const Placement p({7, 2, 9});
    const InterpolationSystem sys = build_theta(p, rb);
    for (Index i = 0; i < 3; ++i)
        for (Index k = 0; k < 3; ++k)
            CHECK(sys.theta()(i, k) == rb.modes(p[i], k));

    CHECK_THROWS_AS(build_theta(Placement({1}), b), Error);
}

TEST_CASE("single-mode hand solve") {
    Vector y(1);
    y << 4.0;
    const SnapshotReconstruction rec = reconstruct_snapshot(y, Placement({1}), single_mode());
    CHECK(rec.coefficients(0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(rec.field(0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(rec.field(1) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("fields in the affine basis span are reconstructed exactly") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Index m = 15;
        const Index r = 1 + static_cast<Index>(seed % 5);
        const Vector mean = testing::random_matrix(m, 1, seed + 100).col(0) * 10.0;
        const Basis b = testing::basis_from_modes(testing::random_orthonormal(m, r, seed), mean);
        const Vector a = testing::random_matrix(r, 1, seed + 200).col(0);
        const Vector truth = b.modes * a + mean;
        const Placement p = random_placement(CandidateSet::all(m), r, seed + 300);
        if (!build_theta(p, b).usable())
            continue;
        const SnapshotReconstruction rec = reconstruct_snapshot(sample(truth, p), p, b);
        CHECK((rec.field - truth).norm() <= 1e-8 * truth.norm());
        CHECK((sample(rec.field, p) - sample(truth, p)).norm() <= 1e-8 * sample(truth, p).norm());
    }
}

TEST_CASE("noisy fields match the explicit inverse formula") {
    for (Index r = 1; r <= 4; ++r) {
        const Index m = 12;
        const Vector mean = testing::random_matrix(m, 1, 50 + static_cast<std::uint64_t>(r)).col(0);
        const Basis b = testing::basis_from_modes(testing::random_orthonormal(m, r, 60 + static_cast<std::uint64_t>(r)), mean);
        const Vector field = testing::random_matrix(m, 1, 70 + static_cast<std::uint64_t>(r)).col(0) * 3.0;
        const Placement p = qdeim_placement(b);

        const Matrix c = canonical_matrix(p, m);
        const Vector y = c * field;
        const Vector expected = b.modes * (c * b.modes).inverse() * (y - c * mean) + mean;

        const SnapshotReconstruction rec = reconstruct_snapshot(y, p, b);
        CHECK((rec.field - expected).norm() <= 1e-10 * expected.norm());
        // Interpolation consistency: the reconstruction passes through y.
        CHECK((sample(rec.field, p) - y).norm() <= 1e-8 * y.norm());
    }
}

TEST_CASE("reconstruction is linear when the mean is zero") {
    const Basis b = testing::basis_from_modes(testing::random_orthonormal(14, 3, 5));
    const Placement p = qdeim_placement(b);
    const Vector y1 = testing::random_matrix(3, 1, 1).col(0);
    const Vector y2 = testing::random_matrix(3, 1, 2).col(0);
    const double alpha = 1.7, beta = -0.4;
    const Vector lhs = reconstruct_snapshot(alpha * y1 + beta * y2, p, b).field;
    const Vector rhs = alpha * reconstruct_snapshot(y1, p, b).field + beta * reconstruct_snapshot(y2, p, b).field;
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("ill-conditioned systems are rejected") {
    Matrix modes = Matrix::Zero(4, 2);
    modes(0, 0) = 1.0;
    modes(1, 1) = 1.0;
    const Basis b = testing::basis_from_modes(modes);
    try {
        reconstruct_snapshot(Vector::Ones(2), Placement({0, 2}), b);
        FAIL("expected a numerical error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Numerical);
    }
}

TEST_CASE("series reconstruction") {
    const GridGeometry g = GridGeometry::full(6, 6);
    const TrainingSet exact = synth_field(g, 3, 40, 0.0, 2);
    const Basis b = truncate(compute_svd(exact), 3);
    const Placement p = qdeim_placement(b);

    const ReconstructionResult res = reconstruct_series(ObservationSet{sample_rows(exact.data(), p), p}, b, exact.data());
    REQUIRE(res.per_snapshot_mse.has_value());
    const double scale = exact.data().squaredNorm() / static_cast<double>(exact.data().size());
    CHECK(res.per_snapshot_mse->maxCoeff() < 1e-16 * scale);
    CHECK(res.condition_number >= 1.0);

    const ReconstructionResult one = reconstruct_series(ObservationSet{sample_rows(exact.data(), p).leftCols(1), p}, b);
    const SnapshotReconstruction snap = reconstruct_snapshot(sample(exact.data().col(0), p), p, b);
    CHECK(one.fields.col(0) == snap.field);
    CHECK(one.coefficients.col(0) == snap.coefficients);
    CHECK_FALSE(one.per_snapshot_mse.has_value());

    // Batch over 50 noisy snapshots equals the snapshot-by-snapshot loop bit for bit.
    const TrainingSet noisy = synth_field(g, 3, 50, 0.3, 9);
    const Matrix readings = sample_rows(noisy.data(), p);
    const ReconstructionResult batch = reconstruct_series(ObservationSet{readings, p}, b);
    for (Index k = 0; k < 50; ++k) {
        const SnapshotReconstruction s = reconstruct_snapshot(readings.col(k), p, b);
        CHECK(batch.fields.col(k) == s.field);
        CHECK(batch.coefficients.col(k) == s.coefficients);
    }

    CHECK_THROWS_AS(reconstruct_series(ObservationSet{Matrix::Zero(2, 3), p}, b), Error);
    CHECK_THROWS_AS(reconstruct_series(ObservationSet{readings, p}, b, Matrix::Zero(3, 3)), Error);
}

TEST_CASE("mse") {
    const Matrix a = testing::random_matrix(4, 5, 1);
    CHECK(mse(a, a) == 0.0);
    CHECK(mse(Matrix::Zero(1, 1), Matrix::Constant(1, 1, 2.0)) == 4.0);

    const Matrix b = testing::random_matrix(4, 5, 2);
    double total = 0.0;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 5; ++j)
            total += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    CHECK(mse(a, b) == doctest::Approx(total / 20.0).epsilon(1e-14));
    CHECK_THROWS_AS(mse(a, Matrix::Zero(5, 4)), Error);
}

TEST_CASE("reconstruction error never beats orthogonal projection") {
    const TrainingSet ts = synth_field(GridGeometry::full(7, 7), 4, 40, 0.2, 12);
    const Basis b = truncate(compute_svd(ts), 4);
    const double bound = projection_error(b, ts);
    const double scale = (ts.data().colwise() - b.mean.values).squaredNorm() / static_cast<double>(ts.data().size());
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Placement p = random_placement(CandidateSet::all(49), 4, seed);
        if (!build_theta(p, b).usable())
            continue;
        const ReconstructionResult res = reconstruct_series(ObservationSet{sample_rows(ts.data(), p), p}, b);
        CHECK(mse(res.fields, ts.data()) >= bound - 1e-9 * scale);
    }
}
