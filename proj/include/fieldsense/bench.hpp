#pragma once

// Benchmark harness comparing placement methods on a train/test split.

#include "fieldsense/anneal.hpp"
#include "fieldsense/basis.hpp"
#include "fieldsense/error.hpp"
#include "fieldsense/fielddata.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fieldsense {

struct BenchConfig {
    std::optional<Index> rank;         // nullopt: SVHT on the training spectrum
    std::optional<double> noise_std;   // known-noise SVHT when set
    Index iterations = 1000;
    double accept_probability = 0.9;
    std::uint64_t seed = 0;
    Index random_seeds = 20;
    bool kalman_arm = true;
    Index kalman_iterations = 200;
};

struct BenchRow {
    std::string method;
    double train_mse = kUninformative;
    double test_mse = kUninformative;
    double condition_number = kUninformative;
    double seconds = 0.0;
    std::optional<Placement> placement; // absent for the projection target and medians
};

struct BenchReport {
    Index rank = 0;
    double train_scale = 0.0;
    double test_scale = 0.0;
    std::vector<BenchRow> rows;
    std::map<std::string, OptimizationTrace> traces;
    std::optional<std::string> failure; // set when an arm threw; rows hold what finished
    ErrorKind failure_kind = ErrorKind::Numerical;

    const BenchRow& row(const std::string& method) const;
};

/// Method names used in reports.
inline constexpr const char* kTargetMethod = "svht_target";
inline constexpr const char* kAnnealQdeimMethod = "anneal_qdeim_init";
inline constexpr const char* kAnnealRandomMethod = "anneal_random_init";
inline constexpr const char* kQdeimMethod = "qdeim";
inline constexpr const char* kRandomMethod = "random_median";
inline constexpr const char* kKalmanMethod = "kalman_greedy";

/// Contiguous temporal split: the first round(fraction * M) snapshots train,
/// the rest test. Both parts keep at least one snapshot.
std::pair<TrainingSet, TrainingSet> temporal_split(const TrainingSet& ts, double train_fraction);

/// Runs every arm. Arm failures are recorded in `failure` instead of thrown
/// so that finished rows survive.
BenchReport run_benchmark(const TrainingSet& train, const TrainingSet& test, const BenchConfig& cfg);

/// Throws Numerical unless the projection target is <= every method's MSE
/// (within 1e-9 * scale) on both splits.
void check_bench_invariant(const BenchReport& report);

/// CSV columns: method, train_mse, test_mse, condition_number, seconds.
void save_bench_csv(const BenchReport& report, const std::filesystem::path& path);

std::string format_bench_table(const BenchReport& report);

} // namespace fieldsense
