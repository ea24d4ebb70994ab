#pragma once

// Placement scoring by training-set reconstruction error and the
// probabilistic-greedy swap search over sensor locations, plus an exhaustive
// search used as an oracle on small candidate sets.

#include "fieldsense/basis.hpp"
#include "fieldsense/fielddata.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/reconstruct.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace fieldsense {

/// Scores placements against a fixed data set and basis. Every column of the
/// data is sampled at the placement, reconstructed through the basis and
/// compared with the raw column; the score is the MSE over all m x M entries.
/// Placements whose interpolation system fails the condition gate score
/// kUninformative (+inf).
class PlacementEvaluator {
public:
    PlacementEvaluator(const TrainingSet& ts, const Basis& b);

    double operator()(const Placement& p) const;

    /// Mean square of the mean-removed data; the natural unit for tolerances.
    double scale() const noexcept { return scale_; }

private:
    const Basis* basis_;
    Matrix raw_;
    Matrix centered_;
    double scale_;
};

/// Requires |p| == b.rank().
double placement_mse(const Placement& p, const TrainingSet& ts, const Basis& b);

enum class InitRule { Random, Qdeim };

struct AnnealConfig {
    Index iterations = 1000;
    double accept_probability = 0.9;
    std::uint64_t seed = 0;
    InitRule init = InitRule::Random;

    void validate() const;
};

struct OptimizationTrace {
    /// Best MSE after each iteration; entry 0 is the initial placement.
    std::vector<double> best_mse;
};

struct OptimizationResult {
    Placement placement;
    OptimizationTrace trace;
    double mse = kUninformative;
    Index accepted = 0;
};

/// Each iteration swaps one uniformly chosen member of the current placement
/// for a uniformly chosen candidate outside it. The swap is kept only when it
/// strictly lowers the MSE and a uniform draw u satisfies u <= rho; worse
/// swaps are never kept. Requires |cs| > b.rank().
OptimizationResult optimize_placement(const TrainingSet& ts, const CandidateSet& cs, const Basis& b,
                                      const AnnealConfig& cfg);

struct BruteForceResult {
    Placement placement;
    double mse = kUninformative;
};

/// Largest number of subsets brute_force_placement will enumerate.
inline constexpr double kBruteForceLimit = 1e6;

/// Binomial coefficient as a double (saturates instead of overflowing).
double subset_count(Index n, Index k);

/// Minimizes placement_mse over every b.rank()-subset of the candidates,
/// visited in lexicographic order. A later subset replaces the incumbent only
/// if it is lower by more than 1e-12 * scale, so near-ties resolve to the
/// lexicographically first subset.
BruteForceResult brute_force_placement(const TrainingSet& ts, const CandidateSet& cs, const Basis& b);

/// CSV "iteration,mse".
void save_trace(const OptimizationTrace& trace, const std::filesystem::path& path);

} // namespace fieldsense
