#include "fieldsense/anneal.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

namespace fieldsense {

PlacementEvaluator::PlacementEvaluator(const TrainingSet& ts, const Basis& b)
    : basis_(&b), raw_(ts.data()), centered_(ts.data().colwise() - b.mean.values) {
    b.validate();
    if (ts.locations() != b.locations())
        fail(ErrorKind::InvalidArgument, "data has " + std::to_string(ts.locations()) + " locations but basis has " +
                                             std::to_string(b.locations()));
    scale_ = centered_.squaredNorm() / static_cast<double>(centered_.size());
}

double PlacementEvaluator::operator()(const Placement& p) const {
    const InterpolationSystem system(p, *basis_);
    if (!system.usable())
        return kUninformative;
    const Matrix coeffs = system.coefficients_block(sample_rows(raw_, p));
    const Matrix residual = centered_ - basis_->modes * coeffs;
    return residual.squaredNorm() / static_cast<double>(residual.size());
}

double placement_mse(const Placement& p, const TrainingSet& ts, const Basis& b) {
    return PlacementEvaluator(ts, b)(p);
}

void AnnealConfig::validate() const {
    require(iterations >= 0, "iterations must be >= 0");
    require(accept_probability > 0.0 && accept_probability <= 1.0, "accept probability must lie in (0, 1]");
}

namespace {

std::uint64_t loop_seed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
    std::uint64_t out = 0;
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    return out;
}

} // namespace

OptimizationResult optimize_placement(const TrainingSet& ts, const CandidateSet& cs, const Basis& b,
                                      const AnnealConfig& cfg) {
    cfg.validate();
    const Index r = b.rank();
    if (cs.size() <= r)
        fail(ErrorKind::InvalidArgument, "candidate set of size " + std::to_string(cs.size()) +
                                             " leaves no room to swap with rank " + std::to_string(r));
    if (cs.rows().back() >= b.locations())
        fail(ErrorKind::InvalidArgument, "candidate rows exceed basis length");
    const PlacementEvaluator evaluate(ts, b);

    Placement current = cfg.init == InitRule::Qdeim ? qdeim_placement(b, cs) : random_placement(cs, r, cfg.seed);
    std::vector<Index> members = current.indices();
    std::vector<Index> outside;
    for (Index row : cs.rows())
        if (!current.contains(row))
            outside.push_back(row);

    OptimizationResult result{current, {}, evaluate(current), 0};
    result.trace.best_mse.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
    result.trace.best_mse.push_back(result.mse);

    std::mt19937_64 rng(loop_seed(cfg.seed));
    std::uniform_int_distribution<Index> pick_member(0, r - 1);
    std::uniform_int_distribution<Index> pick_outside(0, static_cast<Index>(outside.size()) - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (Index it = 0; it < cfg.iterations; ++it) {
        const auto slot = static_cast<std::size_t>(pick_member(rng));
        const auto other = static_cast<std::size_t>(pick_outside(rng));
        const double u = unit(rng);

        std::vector<Index> trial = members;
        trial[slot] = outside[other];
        const Placement candidate(std::move(trial));
        const double err = evaluate(candidate);
        if (err < result.mse && u <= cfg.accept_probability) {
            std::swap(members[slot], outside[other]);
            result.placement = candidate;
            result.mse = err;
            ++result.accepted;
        }
        result.trace.best_mse.push_back(result.mse);
    }
    return result;
}

double subset_count(Index n, Index k) {
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (Index i = 1; i <= k; ++i)
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

BruteForceResult brute_force_placement(const TrainingSet& ts, const CandidateSet& cs, const Basis& b) {
    const Index r = b.rank();
    const Index n = cs.size();
    if (r > n)
        fail(ErrorKind::InvalidArgument, "fewer candidates than basis rank");
    if (subset_count(n, r) > kBruteForceLimit)
        fail(ErrorKind::InvalidArgument, "brute force would enumerate more than 1e6 subsets");
    const PlacementEvaluator evaluate(ts, b);
    const double tie = 1e-12 * evaluate.scale();

    std::vector<Index> pos(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i)
        pos[static_cast<std::size_t>(i)] = i;
    auto current = [&] {
        std::vector<Index> rows;
        rows.reserve(pos.size());
        for (Index p : pos)
            rows.push_back(cs.rows()[static_cast<std::size_t>(p)]);
        return Placement(std::move(rows));
    };

    BruteForceResult best{current(), kUninformative};
    bool have = false;
    while (true) {
        Placement p = current();
        const double err = evaluate(p);
        if (!have || err < best.mse - tie || (best.mse == kUninformative && err < best.mse)) {
            best = {std::move(p), err};
            have = true;
        }
        // Next combination in lexicographic order.
        Index i = r - 1;
        while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - r + i)
            --i;
        if (i < 0)
            break;
        ++pos[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < r; ++j)
            pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

void save_trace(const OptimizationTrace& trace, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "iteration,mse\n";
    for (std::size_t i = 0; i < trace.best_mse.size(); ++i)
        out << i << ',' << textio::format_double(trace.best_mse[i]) << '\n';
    textio::write_text(path, out.str());
}

} // namespace fieldsense
