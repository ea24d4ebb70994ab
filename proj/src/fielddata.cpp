#include "fieldsense/fielddata.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace fieldsense {

GridGeometry::GridGeometry(Index height, Index width, std::vector<std::uint8_t> mask)
    : height_(height), width_(width), mask_(std::move(mask)) {
    require(height_ >= 1 && width_ >= 1, "grid height and width must be >= 1");
    require(static_cast<Index>(mask_.size()) == height_ * width_,
            "mask length must equal height * width");
    for (Index cell = 0; cell < cell_count(); ++cell)
        if (mask_[static_cast<std::size_t>(cell)] != 0)
            valid_cells_.push_back(cell);
    require(!valid_cells_.empty(), "geometry must contain at least one valid cell");
}

GridGeometry GridGeometry::full(Index height, Index width) {
    require(height >= 1 && width >= 1, "grid height and width must be >= 1");
    return GridGeometry(height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height * width), 1));
}

std::optional<Index> GridGeometry::row_of_cell(Index cell) const {
    auto it = std::lower_bound(valid_cells_.begin(), valid_cells_.end(), cell);
    if (it == valid_cells_.end() || *it != cell)
        return std::nullopt;
    return static_cast<Index>(it - valid_cells_.begin());
}

TrainingSet::TrainingSet(Matrix data, GridGeometry geometry, std::vector<std::int64_t> timestamps)
    : data_(std::move(data)), geometry_(std::move(geometry)), timestamps_(std::move(timestamps)) {
    if (data_.rows() != geometry_.valid_count())
        fail(ErrorKind::InvalidArgument,
             "dimension mismatch: matrix has " + std::to_string(data_.rows()) + " rows but mask has " +
                 std::to_string(geometry_.valid_count()) + " valid cells");
    require(data_.cols() >= 1, "M must be >= 1");
    require(data_.allFinite(), "training data must be finite");
    if (!timestamps_.empty()) {
        require(static_cast<Index>(timestamps_.size()) == data_.cols(),
                "timestamp count must equal snapshot count");
        require(std::adjacent_find(timestamps_.begin(), timestamps_.end(),
                                   [](auto a, auto b) { return b <= a; }) == timestamps_.end(),
                "timestamps must be strictly increasing");
    }
}

TrainingSet TrainingSet::slice(Index first, Index count) const {
    require(first >= 0 && count >= 1 && first + count <= snapshots(), "snapshot slice out of range");
    std::vector<std::int64_t> ts;
    if (!timestamps_.empty())
        ts.assign(timestamps_.begin() + first, timestamps_.begin() + first + count);
    return TrainingSet(data_.middleCols(first, count), geometry_, std::move(ts));
}

GridGeometry load_geometry(const std::filesystem::path& path) {
    const auto lines = textio::read_lines(path);
    std::size_t i = 0;
    auto skip = [&] {
        while (i < lines.size() && (lines[i].empty() || lines[i][0] == '#'))
            ++i;
    };
    skip();
    if (i == lines.size())
        fail(ErrorKind::Format, path.string() + ":1: missing '<height> <width>' header");
    const auto header = textio::split_whitespace(lines[i]);
    if (header.size() != 2)
        fail(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": malformed header");
    const long long height = textio::parse_integer(header[0], i + 1, path);
    const long long width = textio::parse_integer(header[1], i + 1, path);
    if (height < 1 || width < 1)
        fail(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": height and width must be >= 1");
    ++i;

    std::vector<std::uint8_t> mask;
    mask.reserve(static_cast<std::size_t>(height * width));
    long long row = 0;
    for (skip(); i < lines.size(); ++i, skip()) {
        std::string_view line = lines[i];
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.remove_suffix(1);
        if (row == height)
            fail(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": more mask rows than declared");
        if (static_cast<long long>(line.size()) != width)
            fail(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": expected " +
                                        std::to_string(width) + " mask characters");
        for (char c : line) {
            if (c != '0' && c != '1')
                fail(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": mask characters must be '0' or '1'");
            mask.push_back(c == '1' ? 1 : 0);
        }
        ++row;
    }
    if (row != height)
        fail(ErrorKind::Format, path.string() + ": expected " + std::to_string(height) + " mask rows, found " +
                                    std::to_string(row));
    if (std::find(mask.begin(), mask.end(), 1) == mask.end())
        fail(ErrorKind::Format, path.string() + ": mask has no valid cell");
    return GridGeometry(height, width, std::move(mask));
}

void save_geometry(const GridGeometry& geometry, const std::filesystem::path& path) {
    std::ostringstream out;
    out << geometry.height() << ' ' << geometry.width() << '\n';
    for (Index r = 0; r < geometry.height(); ++r) {
        for (Index c = 0; c < geometry.width(); ++c)
            out << (geometry.is_valid(r * geometry.width() + c) ? '1' : '0');
        out << '\n';
    }
    textio::write_text(path, out.str());
}

namespace {

constexpr std::string_view kTimestampTag = "# timestamps";

std::vector<std::int64_t> read_timestamp_comment(const std::filesystem::path& path) {
    std::vector<std::int64_t> out;
    const auto lines = textio::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (!line.starts_with(kTimestampTag))
            continue;
        line.remove_prefix(kTimestampTag.size());
        for (auto tok : textio::split_whitespace(line))
            out.push_back(textio::parse_integer(tok, i + 1, path));
        break;
    }
    return out;
}

} // namespace

TrainingSet load_training(const std::filesystem::path& matrix_path,
                          const std::filesystem::path& geometry_path) {
    Matrix data = textio::read_matrix(matrix_path);
    GridGeometry geometry = load_geometry(geometry_path);
    if (data.rows() != geometry.valid_count())
        fail(ErrorKind::Format, matrix_path.string() + ":1: dimension mismatch: " + std::to_string(data.rows()) +
                                    " rows but " + std::to_string(geometry.valid_count()) + " valid cells in mask");
    if (data.cols() < 1)
        fail(ErrorKind::Format, matrix_path.string() + ":1: M must be >= 1");
    auto timestamps = read_timestamp_comment(matrix_path);
    if (!timestamps.empty() && static_cast<Index>(timestamps.size()) != data.cols())
        fail(ErrorKind::Format, matrix_path.string() + ": timestamp count does not match column count");
    try {
        return TrainingSet(std::move(data), std::move(geometry), std::move(timestamps));
    } catch (const Error& e) {
        fail(ErrorKind::Format, matrix_path.string() + ": " + e.what());
    }
}

void save_training(const TrainingSet& ts, const std::filesystem::path& matrix_path,
                   const std::filesystem::path& geometry_path) {
    std::vector<std::string> comments;
    if (!ts.timestamps().empty()) {
        std::string line = "timestamps";
        for (auto t : ts.timestamps())
            line += " " + std::to_string(t);
        comments.push_back(std::move(line));
    }
    textio::write_matrix(matrix_path, ts.data(), comments);
    save_geometry(ts.geometry(), geometry_path);
}

Normalized mean_normalize(const TrainingSet& ts) {
    MeanVector mean{ts.data().rowwise().mean()};
    Matrix centered = ts.data().colwise() - mean.values;
    return {TrainingSet(std::move(centered), ts.geometry(), ts.timestamps()), std::move(mean)};
}

Vector denormalize(const Vector& field, const MeanVector& mean) {
    require(field.size() == mean.values.size(), "denormalize: field and mean lengths differ");
    return field + mean.values;
}

TrainingSet synth_field(const GridGeometry& geometry, Index n_modes, Index snapshots, double noise_std,
                        std::uint64_t seed) {
    const Index m = geometry.valid_count();
    require(n_modes >= 1, "n_modes must be >= 1");
    require(n_modes <= m, "n_modes must not exceed the number of valid cells");
    require(snapshots >= 1, "M must be >= 1");
    require(noise_std >= 0.0 && std::isfinite(noise_std), "noise_std must be finite and >= 0");

    std::mt19937_64 rng(seed);

    // Distinct bump centers among valid cells (partial Fisher-Yates).
    std::vector<Index> rows(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
        rows[static_cast<std::size_t>(i)] = i;
    for (Index k = 0; k < n_modes; ++k) {
        std::uniform_int_distribution<Index> pick(k, m - 1);
        std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(pick(rng))]);
    }

    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(static_cast<std::size_t>(n_modes));
    for (auto& p : phases)
        p = phase_dist(rng);

    const double bump_width = std::max(1.0, 0.18 * static_cast<double>(std::max(geometry.height(), geometry.width())));
    Matrix spatial(m, n_modes);
    for (Index k = 0; k < n_modes; ++k) {
        const Index center = geometry.cell_of_row(rows[static_cast<std::size_t>(k)]);
        const double cy = static_cast<double>(center / geometry.width());
        const double cx = static_cast<double>(center % geometry.width());
        for (Index i = 0; i < m; ++i) {
            const Index cell = geometry.cell_of_row(i);
            const double dy = static_cast<double>(cell / geometry.width()) - cy;
            const double dx = static_cast<double>(cell % geometry.width()) - cx;
            spatial(i, k) = std::exp(-(dx * dx + dy * dy) / (2.0 * bump_width * bump_width));
        }
    }

    Matrix temporal(n_modes, snapshots);
    for (Index k = 0; k < n_modes; ++k) {
        const double scale = 1.0 / (1.0 + 0.5 * static_cast<double>(k));
        const double omega = 2.0 * std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(snapshots);
        for (Index t = 0; t < snapshots; ++t)
            temporal(k, t) = 1.0 + scale * std::sin(omega * static_cast<double>(t) + phases[static_cast<std::size_t>(k)]);
    }

    Matrix data = spatial * temporal;
    if (noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_std);
        for (Index t = 0; t < snapshots; ++t)
            for (Index i = 0; i < m; ++i)
                data(i, t) += noise(rng);
    }
    return TrainingSet(std::move(data), geometry);
}

double noise_std_for_snr(const TrainingSet& clean, double snr_db) {
    const Matrix centered = clean.data().colwise() - clean.data().rowwise().mean();
    const double power = centered.squaredNorm() / static_cast<double>(centered.size());
    return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

std::vector<std::uint8_t> heatmap_gray_levels(const Vector& field, const GridGeometry& geometry) {
    require(field.size() == geometry.valid_count(), "heatmap field length must equal valid cell count");
    require(field.allFinite(), "heatmap field must be finite");
    const double lo = field.minCoeff();
    const double hi = field.maxCoeff();
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(geometry.cell_count()), 0);
    for (Index i = 0; i < field.size(); ++i) {
        std::uint8_t level = 128;
        if (hi > lo)
            level = static_cast<std::uint8_t>(std::lround(255.0 * (field[i] - lo) / (hi - lo)));
        gray[static_cast<std::size_t>(geometry.cell_of_row(i))] = level;
    }
    return gray;
}

void export_heatmap(const Vector& field, const GridGeometry& geometry, const std::filesystem::path& path,
                    HeatmapFormat format) {
    if (format == HeatmapFormat::Pgm) {
        const auto gray = heatmap_gray_levels(field, geometry);
        std::string out = "P5\n" + std::to_string(geometry.width()) + " " + std::to_string(geometry.height()) + "\n255\n";
        out.append(gray.begin(), gray.end());
        textio::write_text(path, out);
        return;
    }
    require(field.size() == geometry.valid_count(), "heatmap field length must equal valid cell count");
    require(field.allFinite(), "heatmap field must be finite");
    std::ostringstream out;
    for (Index r = 0; r < geometry.height(); ++r) {
        for (Index c = 0; c < geometry.width(); ++c) {
            if (c)
                out << ',';
            const auto row = geometry.row_of_cell(r * geometry.width() + c);
            out << (row ? textio::format_double(field[*row]) : std::string("nan"));
        }
        out << '\n';
    }
    textio::write_text(path, out.str());
}

} // namespace fieldsense
