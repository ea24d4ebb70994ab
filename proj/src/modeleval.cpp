#include "fieldsense/modeleval.hpp"

#include "fieldsense/error.hpp"
#include "fieldsense/textio.hpp"

#include <algorithm>
#include <string>

namespace fieldsense {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_psd(const Matrix& m, const char* what) {
    require(m.rows() == m.cols(), std::string(what) + " must be square");
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()),
            std::string(what) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() >= -1e-10, std::string(what) + " must be positive semidefinite");
}

} // namespace

void StateSpaceModel::validate() const {
    const Index r = transition.rows();
    require(r >= 1 && transition.cols() == r, "transition matrix must be square and non-empty");
    require(spatial.cols() == r, "spatial map must have r columns");
    require(process_noise.rows() == r, "process noise must be r x r");
    require(observation_variance >= 0.0, "observation variance must be >= 0");
    check_psd(process_noise, "process noise");
}

TransitionFit fit_transition(const Matrix& coefficients) {
    const Index r = coefficients.rows();
    const Index steps = coefficients.cols() - 1;
    if (r < 1 || coefficients.cols() < r + 2)
        fail(ErrorKind::InvalidArgument, "state-space fit needs at least r + 2 = " + std::to_string(r + 2) +
                                             " snapshots, got " + std::to_string(coefficients.cols()));
    const Matrix past = coefficients.leftCols(steps);
    const Matrix next = coefficients.rightCols(steps);

    // next = A past  <=>  past^T A^T = next^T
    Eigen::ColPivHouseholderQR<Matrix> qr(past.transpose());
    if (qr.rank() < r)
        fail(ErrorKind::Numerical, "state-space regression is rank deficient (rank " + std::to_string(qr.rank()) +
                                       " < " + std::to_string(r) + ")");
    const Matrix transition = qr.solve(next.transpose()).transpose();
    const Matrix residual = next - transition * past;
    return {transition, symmetrized(residual * residual.transpose() / static_cast<double>(steps))};
}

StateSpaceModel fit_state_space(const Basis& b, std::optional<double> observation_variance) {
    if (b.right_modes.rows() == 0)
        fail(ErrorKind::InvalidArgument, "basis carries no temporal modes; cannot fit a state-space model");
    const Matrix coefficients = b.singular_values.asDiagonal() * b.right_modes.transpose();
    TransitionFit fit = fit_transition(coefficients);
    const double rv = observation_variance ? *observation_variance : 0.01 * fit.process_noise.diagonal().mean();
    StateSpaceModel model{std::move(fit.transition), b.modes, rv, std::move(fit.process_noise)};
    model.validate();
    return model;
}

CovarianceState kalman_measurement_update(const StateSpaceModel& model, const CovarianceState& prior,
                                          const Placement& p) {
    p.check_range(model.spatial.rows());
    const Matrix& pm = prior.p;
    const Matrix s = sample_rows(model.spatial, p);
    const Matrix innovation =
        s * pm * s.transpose() + model.observation_variance * Matrix::Identity(p.size(), p.size());
    Eigen::JacobiSVD<Matrix> svd(innovation);
    const Vector& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 0.0) || sv[0] / sv[sv.size() - 1] > kConditionLimit)
        fail(ErrorKind::Numerical, "innovation covariance is singular; use a positive observation variance");
    const Eigen::LDLT<Matrix> ldlt(innovation);
    const Matrix sp = s * pm;
    return {symmetrized(pm - sp.transpose() * ldlt.solve(sp))};
}

CovarianceState kalman_time_update(const StateSpaceModel& model, const CovarianceState& posterior) {
    return {symmetrized(model.transition * posterior.p * model.transition.transpose() + model.process_noise)};
}

CovarianceState kalman_prior_update(const StateSpaceModel& model, const CovarianceState& prior, const Placement& p) {
    return kalman_time_update(model, kalman_measurement_update(model, prior, p));
}

CovarianceState steady_prior(const StateSpaceModel& model, const Placement& p, Index iterations) {
    require(iterations >= 1, "iterations must be >= 1");
    const Index r = model.transition.rows();
    CovarianceState state{Matrix::Identity(r, r)};
    for (Index it = 0; it < iterations; ++it) {
        CovarianceState next = kalman_prior_update(model, state, p);
        const double change = (next.p - state.p).cwiseAbs().maxCoeff();
        state = std::move(next);
        if (change < 1e-10)
            break;
    }
    return state;
}

double largest_eigenvalue(const CovarianceState& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.p, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

double gamma_of(const std::vector<CovarianceState>& finals) {
    require(!finals.empty(), "gamma needs at least one covariance");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : finals)
        worst = std::max(worst, largest_eigenvalue(c));
    return worst;
}

std::vector<double> gamma_scores(const StateSpaceModel& model, const std::vector<Placement>& placements,
                                 Index iterations) {
    model.validate();
    std::vector<double> out;
    out.reserve(placements.size());
    for (const auto& p : placements)
        out.push_back(largest_eigenvalue(steady_prior(model, p, iterations)));
    return out;
}

double gamma_criterion(const StateSpaceModel& model, const std::vector<Placement>& placements, Index iterations) {
    require(!placements.empty(), "gamma needs at least one placement");
    const auto scores = gamma_scores(model, placements, iterations);
    return *std::max_element(scores.begin(), scores.end());
}

Placement greedy_gamma_placement(const StateSpaceModel& model, const CandidateSet& cs, Index count,
                                 Index iterations) {
    model.validate();
    require(count >= 1 && count <= cs.size(), "greedy placement count out of range");
    std::vector<Index> chosen;
    for (Index step = 0; step < count; ++step) {
        Index best_row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Index row : cs.rows()) {
            if (std::find(chosen.begin(), chosen.end(), row) != chosen.end())
                continue;
            std::vector<Index> trial = chosen;
            trial.push_back(row);
            const double score = largest_eigenvalue(steady_prior(model, Placement(std::move(trial)), iterations));
            if (best_row < 0 || score < best) {
                best = score;
                best_row = row;
            }
        }
        chosen.push_back(best_row);
    }
    return Placement(std::move(chosen));
}

void save_model(const StateSpaceModel& model, const std::filesystem::path& directory) {
    textio::write_matrix(directory / "model_A.txt", model.transition);
    textio::write_matrix(directory / "model_S.txt", model.spatial);
    textio::write_matrix(directory / "model_Rw.txt", model.process_noise);
    textio::write_text(directory / "model.txt", "Rv=" + textio::format_double(model.observation_variance) + "\n");
}

StateSpaceModel load_model(const std::filesystem::path& directory) {
    StateSpaceModel model;
    model.transition = textio::read_matrix(directory / "model_A.txt");
    model.spatial = textio::read_matrix(directory / "model_S.txt");
    model.process_noise = textio::read_matrix(directory / "model_Rw.txt");
    const auto side = directory / "model.txt";
    bool found = false;
    const auto lines = textio::read_lines(side);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (!line.starts_with("Rv="))
            continue;
        model.observation_variance = textio::parse_double(line.substr(3), i + 1, side);
        found = true;
    }
    if (!found)
        fail(ErrorKind::Format, side.string() + ": missing Rv= line");
    try {
        model.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Format, directory.string() + ": " + e.what());
    }
    return model;
}

} // namespace fieldsense
