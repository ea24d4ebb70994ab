#include "fieldsense/basis.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace fieldsense {

void Basis::validate() const {
    const Index r = rank();
    require(r >= 1, "basis rank must be >= 1");
    require(singular_values.size() == r, "basis singular value count must equal rank");
    require(mean.values.size() == modes.rows(), "basis mean length must equal mode length");
    require(right_modes.rows() == 0 || right_modes.cols() == r, "basis right modes must have r columns");
    const Matrix gram = modes.transpose() * modes;
    require((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-8, "basis modes are not orthonormal");
}

SvdFactorization compute_svd(const TrainingSet& ts) {
    const Normalized norm = mean_normalize(ts);
    const Matrix& centered = norm.centered.data();

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        fail(ErrorKind::Numerical, "SVD failed to converge");

    SvdFactorization f{svd.matrixU(), svd.singularValues(), svd.matrixV(), norm.mean};
    for (Index k = 0; k < f.left_modes.cols(); ++k) {
        Index pivot = 0;
        f.left_modes.col(k).cwiseAbs().maxCoeff(&pivot);
        if (f.left_modes(pivot, k) < 0.0) {
            f.left_modes.col(k) *= -1.0;
            f.right_modes.col(k) *= -1.0;
        }
    }
    return f;
}

Basis truncate(const SvdFactorization& f, Index r) {
    if (r < 1 || r > f.rank_capacity())
        fail(ErrorKind::InvalidArgument,
             "rank " + std::to_string(r) + " out of range [1, " + std::to_string(f.rank_capacity()) + "]");
    return Basis{f.left_modes.leftCols(r), f.singular_values.head(r), f.right_modes.leftCols(r), f.mean};
}

double svht_lambda(double beta) {
    require(beta > 0.0 && beta <= 1.0, "aspect ratio must lie in (0, 1]");
    const double s = (beta + 1.0) + std::sqrt(beta * beta + 14.0 * beta + 1.0);
    return std::sqrt(2.0 * (beta + 1.0) + 8.0 * beta / s);
}

double svht_omega(double beta) {
    require(beta > 0.0 && beta <= 1.0, "aspect ratio must lie in (0, 1]");
    return 0.56 * beta * beta * beta - 0.95 * beta * beta + 1.82 * beta + 1.43;
}

namespace {

struct Shape {
    double beta;
    double long_side;
};

Shape shape_of(const SvdFactorization& f) {
    const auto m = static_cast<double>(f.left_modes.rows());
    const auto big_m = static_cast<double>(f.right_modes.rows());
    require(m >= 1 && big_m >= 1, "factorization must have non-empty dimensions");
    return {std::min(m, big_m) / std::max(m, big_m), std::max(m, big_m)};
}

double median(Vector v) {
    std::sort(v.begin(), v.end());
    const Index n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

double svht_threshold(const SvdFactorization& f, std::optional<double> noise_std) {
    require(f.rank_capacity() >= 1, "factorization has no singular values");
    const Shape s = shape_of(f);
    if (noise_std) {
        require(*noise_std >= 0.0, "noise_std must be >= 0");
        return svht_lambda(s.beta) * std::sqrt(s.long_side) * *noise_std;
    }
    return svht_omega(s.beta) * median(f.singular_values);
}

Index svht_rank(const SvdFactorization& f, std::optional<double> noise_std) {
    const double tau = svht_threshold(f, noise_std);
    const Shape s = shape_of(f);
    const double floor = s.long_side * std::numeric_limits<double>::epsilon() * f.singular_values[0];
    const double cut = std::max(tau, floor);
    Index count = 0;
    for (Index k = 0; k < f.rank_capacity(); ++k)
        if (f.singular_values[k] > cut)
            ++count;
    return std::max<Index>(count, 1);
}

double projection_error(const Basis& b, const TrainingSet& ts) {
    require(ts.locations() == b.locations(), "projection_error: basis and data have different location counts");
    const Matrix centered = ts.data().colwise() - b.mean.values;
    const Matrix residual = centered - b.modes * (b.modes.transpose() * centered);
    return residual.squaredNorm() / static_cast<double>(residual.size());
}

namespace {

std::string join(const Vector& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i)
            out += ' ';
        out += textio::format_double(v[i]);
    }
    return out;
}

Vector parse_vector(std::string_view text, std::size_t line, const std::filesystem::path& path) {
    const auto tokens = textio::split_whitespace(text);
    Vector v(static_cast<Index>(tokens.size()));
    for (std::size_t i = 0; i < tokens.size(); ++i)
        v[static_cast<Index>(i)] = textio::parse_double(tokens[i], line, path);
    return v;
}

} // namespace

void save_basis(const Basis& b, const std::filesystem::path& modes_path, const std::filesystem::path& sidecar_path,
                const std::optional<std::filesystem::path>& right_modes_path) {
    textio::write_matrix(modes_path, b.modes);
    std::ostringstream side;
    side << "r=" << b.rank() << '\n';
    side << "sigma=" << join(b.singular_values) << '\n';
    side << "mean=" << join(b.mean.values) << '\n';
    textio::write_text(sidecar_path, side.str());
    if (right_modes_path && b.right_modes.rows() > 0)
        textio::write_matrix(*right_modes_path, b.right_modes);
}

Basis load_basis(const std::filesystem::path& modes_path, const std::filesystem::path& sidecar_path,
                 const std::optional<std::filesystem::path>& right_modes_path) {
    Basis b;
    b.modes = textio::read_matrix(modes_path);

    std::optional<long long> r;
    std::optional<Vector> sigma;
    std::optional<Vector> mean;
    const auto lines = textio::read_lines(sidecar_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::Format, sidecar_path.string() + ":" + std::to_string(i + 1) + ": expected key=value");
        const auto key = line.substr(0, eq);
        const auto value = line.substr(eq + 1);
        if (key == "r") {
            auto tokens = textio::split_whitespace(value);
            if (tokens.size() != 1)
                fail(ErrorKind::Format, sidecar_path.string() + ":" + std::to_string(i + 1) + ": malformed r");
            r = textio::parse_integer(tokens[0], i + 1, sidecar_path);
        } else if (key == "sigma") {
            sigma = parse_vector(value, i + 1, sidecar_path);
        } else if (key == "mean") {
            mean = parse_vector(value, i + 1, sidecar_path);
        } else {
            fail(ErrorKind::Format, sidecar_path.string() + ":" + std::to_string(i + 1) + ": unknown key '" +
                                        std::string(key) + "'");
        }
    }
    if (!r || !sigma || !mean)
        fail(ErrorKind::Format, sidecar_path.string() + ": sidecar needs r=, sigma= and mean= lines");
    if (*r != b.modes.cols() || sigma->size() != *r || mean->size() != b.modes.rows())
        fail(ErrorKind::Format, sidecar_path.string() + ": dimension mismatch between sidecar and modes file");
    b.singular_values = std::move(*sigma);
    b.mean.values = std::move(*mean);
    b.right_modes = Matrix(0, b.modes.cols());
    if (right_modes_path && std::filesystem::exists(*right_modes_path)) {
        b.right_modes = textio::read_matrix(*right_modes_path);
        if (b.right_modes.cols() != b.modes.cols())
            fail(ErrorKind::Format, right_modes_path->string() + ": right modes column count differs from rank");
    }
    try {
        b.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Format, modes_path.string() + ": " + e.what());
    }
    return b;
}

} // namespace fieldsense
