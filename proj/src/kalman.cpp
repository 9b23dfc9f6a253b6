#include "enki/kalman.hpp"

#include "enki/linalg.hpp"

namespace enki {

Ensemble perturb_observations(const ObservationSpec& obs, Eigen::Index J,
                              RngStream& rng) {
  if (J < 2) throw DimensionMismatch("perturb_observations: J must be >= 2");
  const Eigen::Index dy = obs.y_bar.size();
  const Eigen::MatrixXd s = principal_sqrt(obs.Gamma).s;
  Eigen::MatrixXd xi(dy, J);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index i = 0; i < dy; ++i) xi(i, j) = rng.normal();
  // centering makes the empirical draw mean equal y_bar exactly, so the
  // steady-state mean identities hold on the ensemble and not just in
  // expectation
  xi.colwise() -= xi.rowwise().mean().eval();
  Eigen::MatrixXd draws = (s * xi).colwise() + obs.y_bar;
  return Ensemble(std::move(draws));
}

KalmanGains compute_gains(const Ensemble& theta_prior, const Ensemble& x_prior,
                          const ObservationSpec& obs, DivisorConvention conv) {
  if (theta_prior.size() != x_prior.size())
    throw DimensionMismatch("compute_gains: ensemble sizes differ");
  if (obs.H.cols() != x_prior.dim())
    throw DimensionMismatch("compute_gains: H columns != d_x");

  const Eigen::MatrixXd c_theta_x = cross_covariance(theta_prior, x_prior, conv).data;
  const Eigen::MatrixXd c_xx = cross_covariance(x_prior, x_prior, conv).data;

  const Eigen::MatrixXd s = obs.H * c_xx * obs.H.transpose() + obs.Gamma;
  // one factorization serves both gains: solve S X = [rhs_theta | rhs_x]
  const Eigen::MatrixXd rhs_theta = obs.H * c_theta_x.transpose();  // d_y x d_theta
  const Eigen::MatrixXd rhs_x = obs.H * c_xx.transpose();           // d_y x d_x
  Eigen::MatrixXd rhs(s.rows(), rhs_theta.cols() + rhs_x.cols());
  rhs << rhs_theta, rhs_x;
  const Eigen::MatrixXd sol = spd_solve(s, rhs);

  KalmanGains g;
  g.K = sol.leftCols(rhs_theta.cols()).transpose();
  g.K_prime = sol.rightCols(rhs_x.cols()).transpose();
  return g;
}

UpdateResult update_stage(const Ensemble& theta_prior, const Ensemble& x_prior,
                          const Ensemble& obs_draws, const ObservationSpec& obs,
                          const KalmanGains& gains) {
  if (theta_prior.size() != x_prior.size() ||
      theta_prior.size() != obs_draws.size())
    throw DimensionMismatch("update_stage: ensemble sizes differ");
  if (obs_draws.dim() != obs.H.rows())
    throw DimensionMismatch("update_stage: observation dimension mismatch");

  const Eigen::MatrixXd innov =
      obs_draws.members() - obs.H * x_prior.members();
  UpdateResult out{Ensemble(theta_prior.members() + gains.K * innov),
                   Ensemble(x_prior.members() + gains.K_prime * innov)};
  return out;
}

IterationState prediction_stage(const Ensemble& theta_post,
                                const ForwardModel& model, int next_t) {
  if (theta_post.dim() != model.d_theta)
    throw DimensionMismatch("prediction_stage: parameter dimension mismatch");
  Eigen::MatrixXd x(model.d_x, theta_post.size());
  for (Eigen::Index j = 0; j < theta_post.size(); ++j) {
    try {
      x.col(j) = model.eval(theta_post.member(j));
    } catch (const std::exception& e) {
      throw ModelEvalError(static_cast<int>(j), e.what());
    }
    if (!x.col(j).allFinite())
      throw ModelEvalError(static_cast<int>(j), "non-finite state");
  }
  return IterationState{theta_post, Ensemble(std::move(x)), next_t};
}

double innovation_norm(const Eigen::VectorXd& theta_mean,
                       const ForwardModel& model, const ObservationSpec& obs) {
  const Eigen::VectorXd x = model.eval(theta_mean);
  return (obs.y_bar - obs.H * x).squaredNorm();
}

}  // namespace enki
