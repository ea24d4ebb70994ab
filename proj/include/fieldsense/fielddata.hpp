#pragma once

// Gridded snapshot data: geometry with a validity mask, the snapshot matrix
// over valid cells, normalization, synthetic generation and heatmap export.
//
// Cells are indexed 0-based, row-major over the full height x width grid.
// Valid cells are compacted in ascending cell order into matrix rows, so
// matrix row i corresponds to geometry.cell_of_row(i).

#include "fieldsense/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace fieldsense {

class GridGeometry {
public:
    /// mask[cell] != 0 marks a valid location; throws InvalidArgument on
    /// non-positive sizes, wrong mask length or an all-masked grid.
    GridGeometry(Index height, Index width, std::vector<std::uint8_t> mask);

    /// Fully valid grid.
    static GridGeometry full(Index height, Index width);

    Index height() const noexcept { return height_; }
    Index width() const noexcept { return width_; }
    Index cell_count() const noexcept { return height_ * width_; }
    Index valid_count() const noexcept { return static_cast<Index>(valid_cells_.size()); }

    bool is_valid(Index cell) const { return mask_.at(static_cast<std::size_t>(cell)) != 0; }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

    /// Full-grid cell index of matrix row `row`.
    Index cell_of_row(Index row) const { return valid_cells_.at(static_cast<std::size_t>(row)); }

    /// Matrix row of a valid cell, or nullopt for masked/out-of-range cells.
    std::optional<Index> row_of_cell(Index cell) const;

    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

private:
    Index height_;
    Index width_;
    std::vector<std::uint8_t> mask_;
    std::vector<Index> valid_cells_;
};

class TrainingSet {
public:
    /// Validates m == geometry.valid_count(), M >= 1, finite entries and
    /// strictly increasing timestamps (when given).
    TrainingSet(Matrix data, GridGeometry geometry, std::vector<std::int64_t> timestamps = {});

    const Matrix& data() const noexcept { return data_; }
    const GridGeometry& geometry() const noexcept { return geometry_; }
    const std::vector<std::int64_t>& timestamps() const noexcept { return timestamps_; }

    Index locations() const noexcept { return data_.rows(); }
    Index snapshots() const noexcept { return data_.cols(); }

    /// Contiguous range of snapshots [first, first + count).
    TrainingSet slice(Index first, Index count) const;

private:
    Matrix data_;
    GridGeometry geometry_;
    std::vector<std::int64_t> timestamps_;
};

struct MeanVector {
    Vector values;
};

GridGeometry load_geometry(const std::filesystem::path& path);
void save_geometry(const GridGeometry& geometry, const std::filesystem::path& path);

TrainingSet load_training(const std::filesystem::path& matrix_path,
                          const std::filesystem::path& geometry_path);
void save_training(const TrainingSet& ts, const std::filesystem::path& matrix_path,
                   const std::filesystem::path& geometry_path);

/// Per-location temporal mean removal.
struct Normalized {
    TrainingSet centered;
    MeanVector mean;
};
Normalized mean_normalize(const TrainingSet& ts);

Vector denormalize(const Vector& field, const MeanVector& mean);

/// Sum of n_modes Gaussian bumps with seed-chosen distinct centers, each
/// modulated by a_k(t) = 1 + s_k sin(2 pi (k+1) t / M + phase_k), plus
/// i.i.d. N(0, noise_std^2) noise. The sinusoids complete whole periods over
/// the M snapshots, so the temporal mean of snapshot k's amplitude is exactly
/// 1 and the centered data has rank n_modes when noise_std = 0 and
/// n_modes < M / 2.
TrainingSet synth_field(const GridGeometry& geometry, Index n_modes, Index snapshots,
                        double noise_std, std::uint64_t seed);

/// Noise standard deviation giving the requested SNR (dB) relative to the
/// mean-square of the centered clean data.
double noise_std_for_snr(const TrainingSet& clean, double snr_db);

enum class HeatmapFormat { Pgm, Csv };

void export_heatmap(const Vector& field, const GridGeometry& geometry,
                    const std::filesystem::path& path, HeatmapFormat format);

/// Gray levels used by the PGM writer (one byte per grid cell, row-major).
std::vector<std::uint8_t> heatmap_gray_levels(const Vector& field, const GridGeometry& geometry);

} // namespace fieldsense
