#include <doctest.h>

#include "fieldsense/basis.hpp"
#include "fieldsense/error.hpp"
#include "test_support.hpp"

#include <cmath>
#include <fstream>

using namespace fieldsense;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Factorization with identity modes and the given spectrum on an n x n shape.
SvdFactorization square_factorization(const Vector& sigma) {
    const Index n = sigma.size();
    return SvdFactorization{Matrix::Identity(n, n), sigma, Matrix::Identity(n, n), MeanVector{Vector::Zero(n)}};
}

} // namespace

TEST_CASE("hand-computed 2x2 factorization") {
    // Columns [3,4] and [-3,-4]: zero row means, centered = [[3,-3],[4,-4]].
    // Rank one; sigma_1^2 = trace(X X^T) = 9 + 9 + 16 + 16 = 50 and the left
    // mode is [3,4]/5.
    Matrix data(2, 2);
    data << 3, -3, 4, -4;
    const SvdFactorization f = compute_svd(testing::full_grid_set(data));
    CHECK(f.mean.values.isZero(0.0));
    CHECK(f.singular_values(0) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-14));
    CHECK(f.singular_values(1) < 1e-14);
    CHECK(f.left_modes(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(f.left_modes(1, 0) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("factorization invariants on random data") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index m = 6 + static_cast<Index>(seed % 3);
        const Index big_m = 10 - static_cast<Index>(seed % 5);
        const Matrix data = testing::random_matrix(m, big_m, seed) * 4.0;
        const SvdFactorization f = compute_svd(testing::full_grid_set(data));
        const Index p = std::min(m, big_m);
        REQUIRE(f.rank_capacity() == p);

        CHECK(max_abs(f.left_modes.transpose() * f.left_modes - Matrix::Identity(p, p)) < 1e-8);
        CHECK(max_abs(f.right_modes.transpose() * f.right_modes - Matrix::Identity(p, p)) < 1e-8);
        for (Index k = 1; k < p; ++k)
            CHECK(f.singular_values(k) <= f.singular_values(k - 1));

        const Matrix rebuilt = (f.left_modes * f.singular_values.asDiagonal() * f.right_modes.transpose()).colwise() +
                               f.mean.values;
        CHECK(max_abs(rebuilt - data) <= 1e-8 * max_abs(data));

        for (Index k = 0; k < p; ++k) {
            Index at = 0;
            f.left_modes.col(k).cwiseAbs().maxCoeff(&at);
            CHECK(f.left_modes(at, k) > 0.0);
        }

        const SvdFactorization again = compute_svd(testing::full_grid_set(data));
        CHECK(again.left_modes == f.left_modes);
        CHECK(again.singular_values == f.singular_values);
        CHECK(again.right_modes == f.right_modes);
    }
}

TEST_CASE("rank-1 synthetic set has a single significant singular value") {
    const TrainingSet ts = synth_field(GridGeometry::full(7, 5), 1, 24, 0.0, 3);
    const SvdFactorization f = compute_svd(ts);
    CHECK(f.singular_values(1) < 1e-10 * f.singular_values(0));
}

TEST_CASE("truncation error follows the discarded spectrum") {
    // Centered spectrum [5, 3, 1] on a 3 x 4 set: dropping the last value
    // leaves squared error 1, i.e. MSE 1/12 over the 12 entries.
    Vector sigma(3);
    sigma << 5, 3, 1;
    const Matrix data = testing::data_with_spectrum(3, 4, sigma, 17);
    const TrainingSet ts = testing::full_grid_set(data);
    const SvdFactorization f = compute_svd(ts);
    CHECK(f.singular_values.isApprox(sigma, 1e-12));

    const Basis b2 = truncate(f, 2);
    CHECK(b2.rank() == 2);
    const Matrix centered = data.colwise() - f.mean.values;
    const Matrix approx = b2.modes * b2.singular_values.asDiagonal() * b2.right_modes.transpose();
    CHECK((centered - approx).squaredNorm() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(projection_error(b2, ts) == doctest::Approx(1.0 / 12.0).epsilon(1e-8));

    const Basis full = truncate(f, 3);
    CHECK(projection_error(full, ts) < 1e-24 * 25.0);

    CHECK_THROWS_AS(truncate(f, 0), Error);
    CHECK_THROWS_AS(truncate(f, 4), Error);
}

TEST_CASE("Eckart-Young identity against an independent SVD") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix data = testing::random_matrix(8, 12, 100 + seed);
        const TrainingSet ts = testing::full_grid_set(data);
        const SvdFactorization f = compute_svd(ts);

        // Oracle: center by hand, factor with a different algorithm.
        const Matrix centered = data.colwise() - data.rowwise().mean();
        Eigen::JacobiSVD<Matrix> oracle(centered);
        const Vector& s = oracle.singularValues();

        for (Index r = 1; r <= f.rank_capacity(); ++r) {
            const Basis b = truncate(f, r);
            const double err =
                (centered - b.modes * b.singular_values.asDiagonal() * b.right_modes.transpose()).squaredNorm();
            const double discarded = s.tail(s.size() - r).squaredNorm();
            CHECK(std::abs(err - discarded) <= 1e-8 * std::max(discarded, 1e-8 * s(0) * s(0)));
        }
    }
}

TEST_CASE("SVHT coefficients") {
    CHECK(svht_lambda(1.0) == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(svht_omega(1.0) == doctest::Approx(2.86).epsilon(1e-15));
    CHECK_THROWS_AS(svht_lambda(0.0), Error);
    CHECK_THROWS_AS(svht_omega(1.5), Error);
}

TEST_CASE("SVHT unknown-noise example") {
    Vector sigma(5);
    sigma << 10, 9, 0.5, 0.45, 0.4;
    const SvdFactorization f = square_factorization(sigma);
    // median 0.5, omega(1) = 2.86, tau = 1.43
    CHECK(svht_threshold(f, std::nullopt) == doctest::Approx(1.43).epsilon(1e-14));
    CHECK(svht_rank(f) == 2);
}

TEST_CASE("SVHT known-noise branch") {
    Vector sigma(4);
    sigma << 10, 3, 2, 1;
    const SvdFactorization f = square_factorization(sigma);
    // tau = (4/sqrt 3) * sqrt(4) * noise
    CHECK(svht_threshold(f, 1.0) == doctest::Approx(8.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(svht_rank(f, 1.0) == 1);
    CHECK(svht_rank(f, 0.5) == 2);
    CHECK(svht_rank(f, 100.0) == 1);
    CHECK_THROWS_AS(svht_rank(f, -1.0), Error);

    // Rank never increases as the known noise grows.
    const SvdFactorization g = compute_svd(testing::full_grid_set(testing::random_matrix(12, 20, 5)));
    Index previous = g.rank_capacity() + 1;
    for (double noise = 0.0; noise < 2.0; noise += 0.01) {
        const Index r = svht_rank(g, noise);
        CHECK(r <= previous);
        previous = r;
    }
}

TEST_CASE("SVHT recovers the rank of noiseless synthetic data") {
    for (Index k : {1, 2, 3, 5}) {
        const TrainingSet ts = synth_field(GridGeometry::full(8, 8), k, 64, 0.0, 40 + static_cast<std::uint64_t>(k));
        const SvdFactorization f = compute_svd(ts);
        CHECK(svht_rank(f) == k);
        CHECK(svht_rank(f, 0.0) == k);
    }
}

TEST_CASE("projection error is non-increasing in rank") {
    const TrainingSet ts = synth_field(GridGeometry::full(6, 6), 4, 30, 0.2, 8);
    const SvdFactorization f = compute_svd(ts);
    double previous = std::numeric_limits<double>::infinity();
    for (Index r = 1; r <= f.rank_capacity(); ++r) {
        const double e = projection_error(truncate(f, r), ts);
        CHECK(e <= previous * (1.0 + 1e-12) + 1e-30);
        previous = e;
    }

    const TrainingSet exact = synth_field(GridGeometry::full(6, 6), 3, 30, 0.0, 8);
    const SvdFactorization fe = compute_svd(exact);
    CHECK(projection_error(truncate(fe, 3), exact) < 1e-16 * fe.singular_values(0) * fe.singular_values(0));

    CHECK_THROWS_AS(projection_error(truncate(fe, 3), testing::full_grid_set(Matrix::Zero(5, 3))), Error);
}

TEST_CASE("basis files round-trip exactly") {
    const auto dir = testing::temp_dir("basis_io");
    const TrainingSet ts = synth_field(GridGeometry::full(5, 4), 3, 25, 0.05, 2);
    const Basis b = truncate(compute_svd(ts), 3);
    save_basis(b, dir / "modes.txt", dir / "basis.txt", dir / "right.txt");
    const Basis back = load_basis(dir / "modes.txt", dir / "basis.txt", dir / "right.txt");
    CHECK(back.modes == b.modes);
    CHECK(back.singular_values == b.singular_values);
    CHECK(back.mean.values == b.mean.values);
    CHECK(back.right_modes == b.right_modes);

    const Basis no_right = load_basis(dir / "modes.txt", dir / "basis.txt");
    CHECK(no_right.right_modes.rows() == 0);

    std::ofstream(dir / "bad.txt") << "r=2\nsigma=1 2\nmean=0\n";
    CHECK_THROWS_AS(load_basis(dir / "modes.txt", dir / "bad.txt"), Error);
}
