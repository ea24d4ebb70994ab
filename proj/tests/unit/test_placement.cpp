#include <doctest.h>

#include "fieldsense/error.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/reconstruct.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

using namespace fieldsense;

TEST_CASE("placement invariants") {
    CHECK_THROWS_AS(Placement({}), Error);
    CHECK_THROWS_AS(Placement({1, 2, 1}), Error);
    CHECK_THROWS_AS(Placement({-1}), Error);
    const Placement p({3, 1});
    CHECK_THROWS_AS(p.check_range(3), Error);
    CHECK_NOTHROW(p.check_range(4));

    CHECK_THROWS_AS(CandidateSet({}, 4), Error);
    CHECK_THROWS_AS(CandidateSet({0, 4}, 4), Error);
    CHECK(CandidateSet({3, 1, 3}, 4).rows() == std::vector<Index>{1, 3});
}

TEST_CASE("canonical selection") {
    Vector phi(4);
    phi << 10, 20, 30, 40;
    const Placement p({2, 0});
    const Vector y = sample(phi, p);
    CHECK(y(0) == 30.0);
    CHECK(y(1) == 10.0);
    CHECK(canonical_matrix(p, 4) * phi == y);

    const Placement all({0, 1, 2, 3});
    CHECK(canonical_matrix(all, 4) == Matrix::Identity(4, 4));
    CHECK(sample(phi, all) == phi);

    CHECK(sample(phi, Placement({3}))(0) == 40.0);
    CHECK_THROWS_AS(sample(phi, Placement({4})), Error);
    CHECK_THROWS_AS(canonical_matrix(Placement({5}), 4), Error);
}

TEST_CASE("selection equals the explicit 0/1 product on random inputs") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Index m = 5 + static_cast<Index>(rng() % 20);
        const Index r = 1 + static_cast<Index>(rng() % m);
        const Placement p = random_placement(CandidateSet::all(m), r, rng());
        const Matrix fields = testing::random_matrix(m, 3, rng());
        const Matrix c = canonical_matrix(p, m);
        CHECK(c * fields == sample_rows(fields, p));
        CHECK(c * fields.col(0) == sample(fields.col(0), p));
    }
}

TEST_CASE("sampling is linear in the mean shift") {
    const Vector x = testing::random_matrix(9, 1, 4).col(0);
    const MeanVector mean{testing::random_matrix(9, 1, 5).col(0)};
    const Placement p({8, 2, 5});
    const Vector lhs = sample(denormalize(x, mean), p);
    const Vector rhs = sample(x, p) + sample(mean.values, p);
    CHECK(lhs == rhs);
}

TEST_CASE("random_placement") {
    const CandidateSet cs({2, 4, 6, 8, 10}, 11);
    const Placement whole = random_placement(cs, 5, 9);
    std::vector<Index> sorted = whole.indices();
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == cs.rows());

    CHECK(random_placement(cs, 3, 77) == random_placement(cs, 3, 77));
    CHECK_THROWS_AS(random_placement(cs, 6, 1), Error);
    CHECK_THROWS_AS(random_placement(cs, 0, 1), Error);
}

TEST_CASE("random_placement draws unordered pairs uniformly") {
    const CandidateSet cs = CandidateSet::all(5);
    std::map<std::pair<Index, Index>, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const Placement p = random_placement(cs, 2, static_cast<std::uint64_t>(i) * 7919 + 1);
        for (Index idx : p.indices())
            CHECK(cs.contains(idx));
        counts[{std::min(p[0], p[1]), std::max(p[0], p[1])}]++;
    }
    REQUIRE(counts.size() == 10);
    const double expected = draws / 10.0;
    const double sd = std::sqrt(draws * 0.1 * 0.9);
    double chi2 = 0.0;
    for (const auto& [pair, n] : counts) {
        CHECK(std::abs(n - expected) <= 4.0 * sd);
        chi2 += (n - expected) * (n - expected) / expected;
    }
    // 9 degrees of freedom; the 0.999 quantile is 27.9.
    CHECK(chi2 < 27.9);
}

TEST_CASE("pivoted rows: hand-run example") {
    // Columns of modes^T: (1,0), (0,1), (0.5,0.5). Step 1: norms 1, 1, 0.707,
    // tie broken toward row 0. Step 2: residuals (0,1) and (0,0.5): row 1.
    Matrix modes(3, 2);
    modes << 1, 0, 0, 1, 0.5, 0.5;
    CHECK(pivoted_rows(modes, 2) == std::vector<Index>{0, 1});
}

TEST_CASE("qdeim on an identity block picks exactly those rows") {
    Matrix modes = Matrix::Zero(7, 3);
    modes.topRows(3) = Matrix::Identity(3, 3);
    const Placement p = qdeim_placement(testing::basis_from_modes(modes));
    std::vector<Index> sorted = p.indices();
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<Index>{0, 1, 2});

    const Placement restricted = qdeim_placement(testing::basis_from_modes(testing::random_orthonormal(12, 3, 1)),
                                                 CandidateSet({1, 4, 5, 9}, 12));
    for (Index idx : restricted.indices())
        CHECK((idx == 1 || idx == 4 || idx == 5 || idx == 9));
}

TEST_CASE("qdeim conditioning beats almost all random placements") {
    const Matrix modes = testing::random_orthonormal(20, 4, 2024);
    const Basis b = testing::basis_from_modes(modes);
    const Placement q = qdeim_placement(b);
    CHECK(q == qdeim_placement(b));
    const double cond_q = build_theta(q, b).condition_number();

    int worse_or_equal = 0;
    const CandidateSet cs = CandidateSet::all(20);
    for (int i = 0; i < 1000; ++i) {
        const double cond = build_theta(random_placement(cs, 4, 5000 + static_cast<std::uint64_t>(i)), b).condition_number();
        worse_or_equal += cond_q <= cond;
    }
    CHECK(worse_or_equal >= 950);
}

TEST_CASE("placement files") {
    const auto dir = testing::temp_dir("placement_io");
    const Placement p({5, 0, 3});
    save_placement(p, dir / "p.txt");
    CHECK(load_placement(dir / "p.txt") == p);
    std::ofstream(dir / "dup.txt") << "1\n1\n";
    CHECK_THROWS_AS(load_placement(dir / "dup.txt"), Error);
}
