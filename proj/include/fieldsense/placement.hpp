#pragma once

// Sensor placements over the valid-cell rows of a snapshot matrix, the
// canonical selection operator they induce, and the non-iterative placement
// rules (uniform random draw and QR column pivoting on the basis).

#include "fieldsense/basis.hpp"
#include "fieldsense/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace fieldsense {

/// Ordered list of distinct valid-cell row indices.
class Placement {
public:
    /// Throws InvalidArgument on an empty list, negative or repeated indices.
    explicit Placement(std::vector<Index> indices);

    const std::vector<Index>& indices() const noexcept { return indices_; }
    Index size() const noexcept { return static_cast<Index>(indices_.size()); }
    Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }

    bool contains(Index row) const;

    /// Throws InvalidArgument when an index is >= m.
    void check_range(Index m) const;

    friend bool operator==(const Placement&, const Placement&) = default;

private:
    std::vector<Index> indices_;
};

/// Rows eligible to host a sensor; stored sorted and unique.
class CandidateSet {
public:
    CandidateSet(std::vector<Index> rows, Index m);

    static CandidateSet all(Index m);

    const std::vector<Index>& rows() const noexcept { return rows_; }
    Index size() const noexcept { return static_cast<Index>(rows_.size()); }
    bool contains(Index row) const;

private:
    std::vector<Index> rows_;
};

/// Explicit r x m 0/1 selector; row i is the unit vector at p[i].
Matrix canonical_matrix(const Placement& p, Index m);

/// y_i = field[p[i]].
Vector sample(const Vector& field, const Placement& p);

/// Row selection applied to every column (|p| x K).
Matrix sample_rows(const Matrix& fields, const Placement& p);

/// r distinct candidates drawn uniformly without replacement.
Placement random_placement(const CandidateSet& cs, Index r, std::uint64_t seed);

/// Row pivots of `modes` (m x r) by greedy column pivoting on modes^T: each
/// step takes the row with the largest residual norm (lowest index on exact
/// ties), then projects that direction out of every remaining row. Returns
/// `count` row indices in pivot order; `modes` need not be orthonormal.
std::vector<Index> pivoted_rows(const Matrix& modes, Index count);

/// Greedy column pivoting on basis.modes^T: each step picks the column with
/// the largest residual norm (lowest index on exact ties) and projects it out
/// of the remaining columns. Returns the b.rank() pivots in pivot order.
Placement qdeim_placement(const Basis& b);

/// Same rule restricted to candidate rows.
Placement qdeim_placement(const Basis& b, const CandidateSet& cs);

Placement load_placement(const std::filesystem::path& path);
void save_placement(const Placement& p, const std::filesystem::path& path);

} // namespace fieldsense
