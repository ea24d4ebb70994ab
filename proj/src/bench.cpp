#include "fieldsense/bench.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/modeleval.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fieldsense {

const BenchRow& BenchReport::row(const std::string& method) const {
    for (const auto& r : rows)
        if (r.method == method)
            return r;
    fail(ErrorKind::InvalidArgument, "no benchmark row named '" + method + "'");
}

std::pair<TrainingSet, TrainingSet> temporal_split(const TrainingSet& ts, double train_fraction) {
    require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
    require(ts.snapshots() >= 2, "splitting needs at least two snapshots");
    Index n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(ts.snapshots())));
    n_train = std::clamp<Index>(n_train, 1, ts.snapshots() - 1);
    return {ts.slice(0, n_train), ts.slice(n_train, ts.snapshots() - n_train)};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0)
        return kUninformative;
    if (n % 2 == 1)
        return v[n / 2];
    const double lo = v[n / 2 - 1];
    const double hi = v[n / 2];
    return lo == hi ? lo : 0.5 * (lo + hi);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double condition_of(const Placement& p, const Basis& b) { return InterpolationSystem(p, b).condition_number(); }

} // namespace

BenchReport run_benchmark(const TrainingSet& train, const TrainingSet& test, const BenchConfig& cfg) {
    require(train.locations() == test.locations(), "train and test splits must share locations");
    BenchReport report;

    const SvdFactorization svd = compute_svd(train);
    report.rank = cfg.rank ? *cfg.rank : svht_rank(svd, cfg.noise_std);
    const Basis basis = truncate(svd, report.rank);
    const PlacementEvaluator on_train(train, basis);
    const PlacementEvaluator on_test(test, basis);
    report.train_scale = on_train.scale();
    report.test_scale = on_test.scale();
    const CandidateSet everywhere = CandidateSet::all(train.locations());

    auto placement_row = [&](const std::string& name, const Placement& p, double seconds) {
        return BenchRow{name, on_train(p), on_test(p), condition_of(p, basis), seconds, p};
    };

    try {
        auto start = std::chrono::steady_clock::now();
        report.rows.push_back(BenchRow{kTargetMethod, projection_error(basis, train), projection_error(basis, test),
                                       std::nan(""), seconds_since(start), std::nullopt});

        for (InitRule init : {InitRule::Qdeim, InitRule::Random}) {
            start = std::chrono::steady_clock::now();
            const AnnealConfig acfg{cfg.iterations, cfg.accept_probability, cfg.seed, init};
            OptimizationResult opt = optimize_placement(train, everywhere, basis, acfg);
            const std::string name = init == InitRule::Qdeim ? kAnnealQdeimMethod : kAnnealRandomMethod;
            const double elapsed = seconds_since(start);
            report.rows.push_back(placement_row(name, opt.placement, elapsed));
            report.traces.emplace(name, std::move(opt.trace));
        }

        start = std::chrono::steady_clock::now();
        const Placement q = qdeim_placement(basis);
        report.rows.push_back(placement_row(kQdeimMethod, q, seconds_since(start)));

        start = std::chrono::steady_clock::now();
        std::vector<double> train_mse, test_mse, conds;
        for (Index i = 0; i < cfg.random_seeds; ++i) {
            const Placement p = random_placement(everywhere, report.rank, splitmix64(cfg.seed + static_cast<std::uint64_t>(i)));
            train_mse.push_back(on_train(p));
            test_mse.push_back(on_test(p));
            conds.push_back(condition_of(p, basis));
        }
        report.rows.push_back(BenchRow{kRandomMethod, median_of(train_mse), median_of(test_mse), median_of(conds),
                                       seconds_since(start), std::nullopt});

        if (cfg.kalman_arm && train.snapshots() >= report.rank + 2) {
            start = std::chrono::steady_clock::now();
            StateSpaceModel model = fit_state_space(basis);
            // A perfectly linear coefficient series leaves R_w = 0 and hence
            // R_v = 0; keep the innovation invertible.
            if (model.observation_variance <= 0.0)
                model.observation_variance = 1e-6 * report.train_scale;
            const Placement k = greedy_gamma_placement(model, everywhere, report.rank, cfg.kalman_iterations);
            report.rows.push_back(placement_row(kKalmanMethod, k, seconds_since(start)));
        }
    } catch (const Error& e) {
        report.failure = e.what();
        report.failure_kind = e.kind();
    } catch (const std::exception& e) {
        report.failure = e.what();
    }
    return report;
}

void check_bench_invariant(const BenchReport& report) {
    const BenchRow& target = report.row(kTargetMethod);
    for (const auto& row : report.rows) {
        if (row.method == kTargetMethod)
            continue;
        if (row.train_mse < target.train_mse - 1e-9 * report.train_scale ||
            row.test_mse < target.test_mse - 1e-9 * report.test_scale)
            fail(ErrorKind::Numerical, "benchmark invariant violated: '" + row.method +
                                           "' beats the projection target");
    }
}

void save_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "method,train_mse,test_mse,condition_number,seconds\n";
    for (const auto& row : report.rows)
        out << row.method << ',' << textio::format_double(row.train_mse) << ','
            << textio::format_double(row.test_mse) << ',' << textio::format_double(row.condition_number) << ','
            << textio::format_double(row.seconds) << '\n';
    textio::write_text(path, out.str());
}

std::string format_bench_table(const BenchReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "rank r = %lld\n", static_cast<long long>(report.rank));
    out << line;
    std::snprintf(line, sizeof line, "%-20s %14s %14s %12s %9s\n", "method", "train_mse", "test_mse", "cond", "seconds");
    out << line;
    for (const auto& row : report.rows) {
        std::snprintf(line, sizeof line, "%-20s %14.6g %14.6g %12.4g %9.3f\n", row.method.c_str(), row.train_mse,
                      row.test_mse, row.condition_number, row.seconds);
        out << line;
    }
    if (report.failure)
        out << "FAILED: " << *report.failure << '\n';
    return out.str();
}

} // namespace fieldsense
