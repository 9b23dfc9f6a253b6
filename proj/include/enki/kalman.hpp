#pragma once

#include <Eigen/Dense>

#include "enki/ensemble.hpp"
#include "enki/problems.hpp"
#include "enki/rng.hpp"

namespace enki {

/// Parameter gain K and state gain K', computed from one shared
/// factorization of (H C_xx H^T + Gamma).
struct KalmanGains {
  Eigen::MatrixXd K;        // d_theta x d_y
  Eigen::MatrixXd K_prime;  // d_x x d_y
};

/// Prior ensembles at iteration t. x_prior is the member-wise forward image
/// of theta_prior except in update-only diagnostics mode.
struct IterationState {
  Ensemble theta_prior;
  Ensemble x_prior;
  int t = 0;
};

/// J i.i.d. draws y_j = y_bar + S xi_j with S S = Gamma.
Ensemble perturb_observations(const ObservationSpec& obs, Eigen::Index J,
                              RngStream& rng);

KalmanGains compute_gains(const Ensemble& theta_prior, const Ensemble& x_prior,
                          const ObservationSpec& obs,
                          DivisorConvention conv =
                              DivisorConvention::PopulationJ);

struct UpdateResult {
  Ensemble theta_post;
  Ensemble x_post;  // diagnostics only; the solver discards it
};

UpdateResult update_stage(const Ensemble& theta_prior, const Ensemble& x_prior,
                          const Ensemble& obs_draws, const ObservationSpec& obs,
                          const KalmanGains& gains);

/// Apply the forward model member-wise and advance the iteration index.
IterationState prediction_stage(const Ensemble& theta_post,
                                const ForwardModel& model, int next_t);

/// || y_bar - H f(theta_mean) ||^2, the squared stopping quantity.
double innovation_norm(const Eigen::VectorXd& theta_mean,
                       const ForwardModel& model, const ObservationSpec& obs);

}  // namespace enki
