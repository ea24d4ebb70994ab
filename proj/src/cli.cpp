#include "fieldsense/cli.hpp"

#include "fieldsense/anneal.hpp"
#include "fieldsense/basis.hpp"
#include "fieldsense/bench.hpp"
#include "fieldsense/error.hpp"
#include "fieldsense/fielddata.hpp"
#include "fieldsense/modeleval.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/reconstruct.hpp"
#include "fieldsense/textio.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>

namespace fieldsense::cli {

namespace fs = std::filesystem;

namespace {

// File names inside a basis directory written by `train`.
constexpr const char* kModesFile = "basis_modes.txt";
constexpr const char* kRightModesFile = "basis_right.txt";
constexpr const char* kSidecarFile = "basis.txt";
constexpr const char* kSpectrumFile = "spectrum.csv";

struct Common {
    std::string out = ".";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-o,--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

fs::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        fail(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

std::optional<Index> parse_rank(const std::string& text) {
    if (text == "svht")
        return std::nullopt;
    try {
        std::size_t used = 0;
        const long long r = std::stoll(text, &used);
        if (used == text.size() && r >= 1)
            return static_cast<Index>(r);
    } catch (const std::exception&) {
    }
    fail(ErrorKind::InvalidArgument, "--rank must be a positive integer or 'svht', got '" + text + "'");
}

Basis load_basis_dir(const fs::path& dir) {
    return load_basis(dir / kModesFile, dir / kSidecarFile, dir / kRightModesFile);
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    Common common;
    Index height = 8;
    Index width = 8;
    Index modes = 3;
    Index snapshots = 50;
    double noise = 0.0;
    std::optional<double> snr_db;
    std::string geometry;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    GridGeometry geometry = a.geometry.empty() ? GridGeometry::full(a.height, a.width) : load_geometry(a.geometry);
    double noise = a.noise;
    if (a.snr_db)
        noise = noise_std_for_snr(synth_field(geometry, a.modes, a.snapshots, 0.0, a.common.seed), *a.snr_db);
    const TrainingSet ts = synth_field(geometry, a.modes, a.snapshots, noise, a.common.seed);
    const fs::path dir = ensure_dir(a.common.out);
    save_training(ts, dir / "training.txt", dir / "geometry.txt");
    out << "wrote " << ts.locations() << " x " << ts.snapshots() << " snapshot matrix (noise std "
        << textio::format_double(noise) << ") to " << (dir / "training.txt").string() << '\n';
    return kSuccess;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string training;
    std::string geometry;
    std::string rank = "svht";
    std::optional<double> noise_std;
    bool model = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const std::optional<Index> explicit_rank = parse_rank(a.rank);
    const TrainingSet ts = load_training(a.training, a.geometry);
    const SvdFactorization f = compute_svd(ts);
    const Index r = explicit_rank ? *explicit_rank : svht_rank(f, a.noise_std);
    const Basis b = truncate(f, r);

    const fs::path dir = ensure_dir(a.common.out);
    save_basis(b, dir / kModesFile, dir / kSidecarFile, dir / kRightModesFile);
    std::ostringstream spectrum;
    spectrum << "index,singular_value\n";
    for (Index k = 0; k < f.rank_capacity(); ++k)
        spectrum << k << ',' << textio::format_double(f.singular_values[k]) << '\n';
    textio::write_text(dir / kSpectrumFile, spectrum.str());
    if (a.model)
        save_model(fit_state_space(b), dir);

    out << "rank r = " << r << (explicit_rank ? "" : " (svht)") << '\n';
    out << "projection MSE on training data: " << textio::format_double(projection_error(b, ts)) << '\n';
    return kSuccess;
}

// ---- place ----------------------------------------------------------------

struct PlaceArgs {
    Common common;
    std::string training;
    std::string geometry;
    std::string basis;
    std::string method = "anneal";
    Index iterations = 1000;
    double rho = 0.9;
    std::string init = "random";
    std::string candidates;
};

int cmd_place(const PlaceArgs& a, std::ostream& out) {
    const TrainingSet ts = load_training(a.training, a.geometry);
    const Basis b = load_basis_dir(a.basis);
    if (b.locations() != ts.locations())
        fail(ErrorKind::Format, "basis and training data have different location counts");
    const CandidateSet cs = a.candidates.empty() ? CandidateSet::all(ts.locations())
                                                 : CandidateSet(textio::read_index_list(a.candidates), ts.locations());

    const fs::path dir = ensure_dir(a.common.out);
    std::optional<Placement> placement;
    double err = kUninformative;
    if (a.method == "anneal") {
        AnnealConfig cfg{a.iterations, a.rho, a.common.seed, a.init == "qdeim" ? InitRule::Qdeim : InitRule::Random};
        OptimizationResult res = optimize_placement(ts, cs, b, cfg);
        save_trace(res.trace, dir / "trace.csv");
        placement = res.placement;
        err = res.mse;
        out << "accepted swaps: " << res.accepted << " of " << a.iterations << '\n';
    } else if (a.method == "qdeim") {
        placement = qdeim_placement(b, cs);
        err = placement_mse(*placement, ts, b);
    } else if (a.method == "random") {
        placement = random_placement(cs, b.rank(), a.common.seed);
        err = placement_mse(*placement, ts, b);
    } else {
        BruteForceResult res = brute_force_placement(ts, cs, b);
        placement = res.placement;
        err = res.mse;
    }
    save_placement(*placement, dir / "placement.txt");
    out << "final training MSE: " << textio::format_double(err) << '\n';
    return kSuccess;
}

// ---- reconstruct ----------------------------------------------------------

struct ReconstructArgs {
    Common common;
    std::string basis;
    std::string placement;
    std::string observations;
    std::string truth;
    std::string geometry;
    Index heatmap_snapshot = 0;
    std::string heatmap_format = "pgm";
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
    const Basis b = load_basis_dir(a.basis);
    const Placement p = load_placement(a.placement);
    std::optional<Matrix> truth;
    if (!a.truth.empty())
        truth = textio::read_matrix(a.truth);
    if (a.observations.empty() && !truth)
        fail(ErrorKind::InvalidArgument, "give --observations, or --truth to sample observations from");
    Matrix readings = a.observations.empty() ? sample_rows(*truth, p) : textio::read_matrix(a.observations);

    ReconstructionResult res;
    try {
        res = reconstruct_series(ObservationSet{std::move(readings), p}, b, truth);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Numerical)
            err << "condition number of the interpolation system: "
                << textio::format_double(InterpolationSystem(p, b).condition_number()) << '\n';
        throw;
    }

    const fs::path dir = ensure_dir(a.common.out);
    textio::write_matrix(dir / "reconstruction.txt", res.fields);
    out << "condition number: " << textio::format_double(res.condition_number) << '\n';
    if (res.per_snapshot_mse) {
        std::ostringstream csv;
        csv << "snapshot,mse\n";
        for (Index k = 0; k < res.per_snapshot_mse->size(); ++k)
            csv << k << ',' << textio::format_double((*res.per_snapshot_mse)[k]) << '\n';
        textio::write_text(dir / "mse.csv", csv.str());
        out << "MSE: " << textio::format_double(mse(res.fields, *truth)) << '\n';
    }

    if (!a.geometry.empty()) {
        const GridGeometry geometry = load_geometry(a.geometry);
        const Index k = a.heatmap_snapshot;
        if (k < 0 || k >= res.fields.cols())
            fail(ErrorKind::InvalidArgument, "--heatmap-snapshot out of range");
        const HeatmapFormat format = a.heatmap_format == "csv" ? HeatmapFormat::Csv : HeatmapFormat::Pgm;
        const std::string ext = a.heatmap_format == "csv" ? ".csv" : ".pgm";
        const std::string suffix = "_" + std::to_string(k) + ext;
        export_heatmap(res.fields.col(k), geometry, dir / ("reconstruction" + suffix), format);
        if (truth) {
            export_heatmap(truth->col(k), geometry, dir / ("truth" + suffix), format);
            const Vector abs_err = (res.fields.col(k) - truth->col(k)).cwiseAbs();
            export_heatmap(abs_err, geometry, dir / ("abs_error" + suffix), format);
        }
    }
    return kSuccess;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    Common common;
    std::string training;
    std::string geometry;
    std::string test;
    double split = 0.8;
    std::string rank = "svht";
    std::optional<double> noise_std;
    Index iterations = 1000;
    double rho = 0.9;
    Index random_seeds = 20;
    bool no_kalman = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    BenchConfig cfg;
    cfg.rank = parse_rank(a.rank);
    cfg.noise_std = a.noise_std;
    cfg.iterations = a.iterations;
    cfg.accept_probability = a.rho;
    cfg.seed = a.common.seed;
    cfg.random_seeds = a.random_seeds;
    cfg.kalman_arm = !a.no_kalman;

    const TrainingSet all = load_training(a.training, a.geometry);
    std::optional<std::pair<TrainingSet, TrainingSet>> split;
    if (a.test.empty())
        split.emplace(temporal_split(all, a.split));
    else
        split.emplace(all, load_training(a.test, a.geometry));

    const BenchReport report = run_benchmark(split->first, split->second, cfg);
    const fs::path dir = ensure_dir(a.common.out);
    save_bench_csv(report, dir / "report.csv");
    for (const auto& [name, trace] : report.traces)
        save_trace(trace, dir / ("trace_" + name + ".csv"));
    for (const auto& row : report.rows)
        if (row.placement)
            save_placement(*row.placement, dir / ("placement_" + row.method + ".txt"));
    out << format_bench_table(report);

    if (report.failure) {
        err << "benchmark arm failed: " << *report.failure << '\n';
        throw Error(report.failure_kind, *report.failure);
    }
    check_bench_invariant(report);
    return kSuccess;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Format:
        return kIoError;
    case ErrorKind::InvalidArgument:
        return kUsageError;
    case ErrorKind::Numerical:
        return kNumericalError;
    }
    return kIoError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse sensor placement and field reconstruction from a truncated SVD basis", "fieldsense"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic snapshot matrix and geometry");
    add_common(s, synth.common);
    s->add_option("--height", synth.height, "Grid height")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--width", synth.width, "Grid width")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--modes", synth.modes, "Number of spatial modes")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--snapshots", synth.snapshots, "Number of snapshots M")->check(CLI::PositiveNumber)->capture_default_str();
    auto* noise = s->add_option("--noise", synth.noise, "Noise standard deviation")->check(CLI::NonNegativeNumber)->capture_default_str();
    s->add_option("--snr-db", synth.snr_db, "Noise level as SNR in dB (overrides --noise)")->excludes(noise);
    s->add_option("--geometry", synth.geometry, "Use this geometry file instead of a full grid")->check(CLI::ExistingFile);

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Learn the truncated SVD basis");
    add_common(t, train.common);
    t->add_option("--training", train.training, "Snapshot matrix file")->required();
    t->add_option("--geometry", train.geometry, "Geometry file")->required();
    t->add_option("--rank", train.rank, "Basis rank, or 'svht'")->capture_default_str();
    t->add_option("--noise-std", train.noise_std, "Known noise level for SVHT");
    t->add_flag("--model", train.model, "Also fit and write the state-space model");

    PlaceArgs place;
    auto* p = app.add_subcommand("place", "Choose sensor locations");
    add_common(p, place.common);
    p->add_option("--training", place.training, "Snapshot matrix file")->required();
    p->add_option("--geometry", place.geometry, "Geometry file")->required();
    p->add_option("--basis", place.basis, "Directory written by 'train'")->required();
    p->add_option("--method", place.method, "Placement method")
        ->check(CLI::IsMember({"anneal", "qdeim", "random", "brute"}))->capture_default_str();
    p->add_option("--iters", place.iterations, "Swap iterations T")->check(CLI::NonNegativeNumber)->capture_default_str();
    p->add_option("--rho", place.rho, "Acceptance probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    p->add_option("--init", place.init, "Initial placement for anneal")
        ->check(CLI::IsMember({"random", "qdeim"}))->capture_default_str();
    p->add_option("--candidates", place.candidates, "Candidate row list (default: every location)");

    ReconstructArgs rec;
    auto* r = app.add_subcommand("reconstruct", "Reconstruct fields from sensor readings");
    add_common(r, rec.common);
    r->add_option("--basis", rec.basis, "Directory written by 'train'")->required();
    r->add_option("--placement", rec.placement, "Placement file")->required();
    r->add_option("--observations", rec.observations, "Readings matrix (sensors x snapshots)");
    r->add_option("--truth", rec.truth, "Ground-truth matrix (locations x snapshots)");
    r->add_option("--geometry", rec.geometry, "Geometry file; enables heatmaps");
    r->add_option("--heatmap-snapshot", rec.heatmap_snapshot, "Snapshot rendered as heatmap")->capture_default_str();
    r->add_option("--heatmap-format", rec.heatmap_format, "Heatmap format")
        ->check(CLI::IsMember({"pgm", "csv"}))->capture_default_str();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Compare placement methods on a train/test split");
    add_common(b, bench.common);
    b->add_option("--training", bench.training, "Snapshot matrix file")->required();
    b->add_option("--geometry", bench.geometry, "Geometry file")->required();
    b->add_option("--test", bench.test, "Held-out snapshot matrix (default: temporal split of --training)");
    b->add_option("--split", bench.split, "Training fraction for the temporal split")->capture_default_str();
    b->add_option("--rank", bench.rank, "Basis rank, or 'svht'")->capture_default_str();
    b->add_option("--noise-std", bench.noise_std, "Known noise level for SVHT");
    b->add_option("--iters", bench.iterations, "Swap iterations T")->check(CLI::NonNegativeNumber)->capture_default_str();
    b->add_option("--rho", bench.rho, "Acceptance probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    b->add_option("--random-seeds", bench.random_seeds, "Random placements in the median arm")
        ->check(CLI::PositiveNumber)->capture_default_str();
    b->add_flag("--no-kalman", bench.no_kalman, "Skip the Kalman-criterion arm");

    std::vector<const char*> argv{"fieldsense"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (app.get_subcommands().empty())
            err << app.help();
        else
            err << app.get_subcommands().front()->help();
        return kUsageError;
    }

    try {
        if (s->parsed())
            return cmd_synth(synth, out);
        if (t->parsed())
            return cmd_train(train, out);
        if (p->parsed())
            return cmd_place(place, out);
        if (r->parsed())
            return cmd_reconstruct(rec, out, err);
        return cmd_bench(bench, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

} // namespace fieldsense::cli
