#pragma once

// Model-based placement scoring: a linear state-space model fitted to the
// basis coefficients, the Kalman prior-covariance recursion under a
// placement, and the worst-case largest-eigenvalue criterion.

#include "fieldsense/basis.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/types.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace fieldsense {

/// v_psi[t] = S_psi x[t] + v[t],  x[t+1] = A x[t] + w[t],
/// v ~ N(0, observation_variance * I), w ~ N(0, process_noise).
struct StateSpaceModel {
    Matrix transition;           // A, r x r
    Matrix spatial;              // S, m x r
    double observation_variance; // R_v (isotropic)
    Matrix process_noise;        // R_w, r x r symmetric PSD

    void validate() const;
};

struct CovarianceState {
    Matrix p; // r x r symmetric PSD
};

/// Least-squares transition for coefficient columns x[0..M-1] (r x M):
/// A minimizes sum_t |x[t+1] - A x[t]|^2; process noise is the second moment
/// of the residuals, (1/(M-1)) sum_t w[t] w[t]^T.
struct TransitionFit {
    Matrix transition;
    Matrix process_noise;
};
TransitionFit fit_transition(const Matrix& coefficients);

/// Coefficients x[t] = diag(S_r) V_r^T; S = Psi_r. When observation_variance
/// is not given it defaults to 0.01 * mean(diag(R_w)). Requires M >= r + 2.
StateSpaceModel fit_state_space(const Basis& b, std::optional<double> observation_variance = std::nullopt);

/// Stacked measurement update for every sensor in p; symmetrized.
CovarianceState kalman_measurement_update(const StateSpaceModel& model, const CovarianceState& prior,
                                          const Placement& p);

/// A P A^T + R_w; symmetrized.
CovarianceState kalman_time_update(const StateSpaceModel& model, const CovarianceState& posterior);

/// Measurement update followed by the time update.
CovarianceState kalman_prior_update(const StateSpaceModel& model, const CovarianceState& prior, const Placement& p);

/// Prior covariance after iterating kalman_prior_update from P0 = I for
/// `iterations` steps or until the largest entry change drops below 1e-10.
CovarianceState steady_prior(const StateSpaceModel& model, const Placement& p, Index iterations);

double largest_eigenvalue(const CovarianceState& c);

/// max over states of their largest eigenvalue.
double gamma_of(const std::vector<CovarianceState>& finals);

/// Largest eigenvalue of steady_prior for each placement.
std::vector<double> gamma_scores(const StateSpaceModel& model, const std::vector<Placement>& placements,
                                 Index iterations);

/// max of gamma_scores; lower is better.
double gamma_criterion(const StateSpaceModel& model, const std::vector<Placement>& placements, Index iterations);

/// Greedy forward selection: repeatedly adds the candidate that gives the
/// lowest largest-eigenvalue score (lowest row on ties) until `count` sensors.
Placement greedy_gamma_placement(const StateSpaceModel& model, const CandidateSet& cs, Index count,
                                 Index iterations);

/// Matrix files for A, S and R_w plus a sidecar "Rv=<real>".
void save_model(const StateSpaceModel& model, const std::filesystem::path& directory);
StateSpaceModel load_model(const std::filesystem::path& directory);

} // namespace fieldsense
