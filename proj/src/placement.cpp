#include "fieldsense/placement.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace fieldsense {

Placement::Placement(std::vector<Index> indices) : indices_(std::move(indices)) {
    require(!indices_.empty(), "placement must contain at least one index");
    std::vector<Index> sorted = indices_;
    std::sort(sorted.begin(), sorted.end());
    require(sorted.front() >= 0, "placement indices must be non-negative");
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "placement indices must be distinct");
}

bool Placement::contains(Index row) const {
    return std::find(indices_.begin(), indices_.end(), row) != indices_.end();
}

void Placement::check_range(Index m) const {
    for (Index i : indices_)
        if (i >= m)
            fail(ErrorKind::InvalidArgument,
                 "placement index " + std::to_string(i) + " out of range for " + std::to_string(m) + " locations");
}

CandidateSet::CandidateSet(std::vector<Index> rows, Index m) : rows_(std::move(rows)) {
    std::sort(rows_.begin(), rows_.end());
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
    require(!rows_.empty(), "candidate set must be non-empty");
    require(rows_.front() >= 0 && rows_.back() < m, "candidate rows must lie in [0, m)");
}

CandidateSet CandidateSet::all(Index m) {
    std::vector<Index> rows(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
        rows[static_cast<std::size_t>(i)] = i;
    return CandidateSet(std::move(rows), m);
}

bool CandidateSet::contains(Index row) const { return std::binary_search(rows_.begin(), rows_.end(), row); }

Matrix canonical_matrix(const Placement& p, Index m) {
    p.check_range(m);
    Matrix c = Matrix::Zero(p.size(), m);
    for (Index i = 0; i < p.size(); ++i)
        c(i, p[i]) = 1.0;
    return c;
}

Vector sample(const Vector& field, const Placement& p) {
    p.check_range(field.size());
    Vector y(p.size());
    for (Index i = 0; i < p.size(); ++i)
        y[i] = field[p[i]];
    return y;
}

Matrix sample_rows(const Matrix& fields, const Placement& p) {
    p.check_range(fields.rows());
    Matrix y(p.size(), fields.cols());
    for (Index i = 0; i < p.size(); ++i)
        y.row(i) = fields.row(p[i]);
    return y;
}

Placement random_placement(const CandidateSet& cs, Index r, std::uint64_t seed) {
    if (r < 1 || r > cs.size())
        fail(ErrorKind::InvalidArgument,
             "cannot draw " + std::to_string(r) + " sensors from " + std::to_string(cs.size()) + " candidates");
    std::vector<Index> pool = cs.rows();
    std::mt19937_64 rng(seed);
    for (Index k = 0; k < r; ++k) {
        std::uniform_int_distribution<Index> pick(k, cs.size() - 1);
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    pool.resize(static_cast<std::size_t>(r));
    return Placement(std::move(pool));
}

std::vector<Index> pivoted_rows(const Matrix& modes, Index count) {
    require(count >= 0 && count <= modes.rows(), "pivot count out of range");
    Matrix columns = modes.transpose();
    const Index n = columns.cols();
    std::vector<Index> pivots;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Index step = 0; step < count; ++step) {
        Index best = -1;
        double best_norm = -1.0;
        for (Index j = 0; j < n; ++j) {
            if (taken[static_cast<std::size_t>(j)])
                continue;
            const double norm = columns.col(j).squaredNorm();
            if (norm > best_norm) {
                best_norm = norm;
                best = j;
            }
        }
        pivots.push_back(best);
        taken[static_cast<std::size_t>(best)] = true;
        if (best_norm <= 0.0)
            continue;
        const Vector q = columns.col(best) / std::sqrt(best_norm);
        // Two passes keep the residual orthogonal to q at working precision.
        for (int pass = 0; pass < 2; ++pass)
            columns -= q * (q.transpose() * columns);
        columns.col(best).setZero();
    }
    return pivots;
}

Placement qdeim_placement(const Basis& b) { return qdeim_placement(b, CandidateSet::all(b.locations())); }

Placement qdeim_placement(const Basis& b, const CandidateSet& cs) {
    b.validate();
    require(cs.rows().back() < b.locations(), "candidate rows exceed basis length");
    if (cs.size() < b.rank())
        fail(ErrorKind::InvalidArgument, "fewer candidates than basis rank");
    Matrix candidate_modes(cs.size(), b.rank());
    for (Index j = 0; j < cs.size(); ++j)
        candidate_modes.row(j) = b.modes.row(cs.rows()[static_cast<std::size_t>(j)]);
    std::vector<Index> rows;
    for (Index j : pivoted_rows(candidate_modes, b.rank()))
        rows.push_back(cs.rows()[static_cast<std::size_t>(j)]);
    return Placement(std::move(rows));
}

Placement load_placement(const std::filesystem::path& path) {
    auto indices = textio::read_index_list(path);
    try {
        return Placement(std::move(indices));
    } catch (const Error& e) {
        fail(ErrorKind::Format, path.string() + ": " + e.what());
    }
}

void save_placement(const Placement& p, const std::filesystem::path& path) {
    textio::write_index_list(path, p.indices());
}

} // namespace fieldsense
