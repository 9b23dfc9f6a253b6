#include "enki/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "enki/linalg.hpp"

namespace enki {

IterationRecord record_iteration(const IterationState& state,
                                 const KalmanGains& gains,
                                 const UpdateResult& post,
                                 const ObservationSpec& obs,
                                 const ForwardModel& model,
                                 DivisorConvention conv) {
  IterationRecord r;
  r.t = state.t;

  const Eigen::MatrixXd c_tt =
      cross_covariance(state.theta_prior, state.theta_prior, conv).data;
  const Eigen::MatrixXd c_tx =
      cross_covariance(state.theta_prior, state.x_prior, conv).data;
  const Eigen::MatrixXd c_xx =
      cross_covariance(state.x_prior, state.x_prior, conv).data;

  r.norm_C_theta_theta = c_tt.norm();
  r.norm_C_theta_Hx = (c_tx * obs.H.transpose()).norm();
  const Eigen::MatrixXd hch = obs.H * c_xx * obs.H.transpose();
  r.norm_C_Hx_Hx = hch.norm();
  r.norm_K = gains.K.norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hch, Eigen::EigenvaluesOnly);
  r.lambda_min_HCHt = es.eigenvalues().minCoeff();

  r.theta_mean = post.theta_post.mean();
  r.x_prior_mean = state.x_prior.mean();
  r.x_post_mean = post.x_post.mean();
  r.innovation = innovation_norm(r.theta_mean, model, obs);

  const Eigen::MatrixXd c_post =
      cross_covariance(post.theta_post, post.theta_post, conv).data;
  r.sigma_sq = c_post.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(c_post,
                                                     Eigen::EigenvaluesOnly);
  r.sigma_sq_max = esp.eigenvalues().maxCoeff();
  return r;
}

Eigen::MatrixXd covariance_recursion_step(const Eigen::MatrixXd& c_tt,
                                          const Eigen::MatrixXd& c_tHx,
                                          const Eigen::MatrixXd& c_HxHx,
                                          const Eigen::MatrixXd& gamma) {
  const Eigen::MatrixXd denom = c_HxHx + gamma;
  const Eigen::MatrixXd x = spd_solve(denom, c_tHx.transpose());
  return c_tt - c_tHx * x;
}

double shrinkage_bound(double alpha, double delta, int t, double norm_C1) {
  return std::pow(alpha / (delta + alpha), t) * norm_C1;
}

std::vector<ShrinkageStepResult> check_per_step_shrinkage(
    const std::vector<IterationRecord>& trace, double alpha) {
  std::vector<ShrinkageStepResult> out;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    ShrinkageStepResult s;
    s.t = trace[i].t;
    s.factor = alpha / (std::max(trace[i].lambda_min_HCHt, 0.0) + alpha);
    s.lhs = trace[i + 1].norm_C_theta_Hx;
    s.rhs = s.factor * trace[i].norm_C_theta_Hx;
    s.pass = s.lhs <= s.rhs * (1.0 + 1e-9) + 1e-300;
    out.push_back(s);
  }
  return out;
}

SteadyStateReport steady_state_check(const Eigen::VectorXd& x_prior_mean,
                                     const Eigen::VectorXd& x_post_mean,
                                     const Eigen::MatrixXd& c_xx,
                                     const ObservationSpec& obs) {
  SteadyStateReport rep;
  const Eigen::VectorXd h_prior = obs.H * x_prior_mean;
  const Eigen::VectorXd h_post = obs.H * x_post_mean;
  rep.oscillation = h_post - h_prior;
  rep.prior_error = h_prior - obs.y_bar;
  rep.post_error = h_post - obs.y_bar;

  const Eigen::MatrixXd hch = obs.H * c_xx * obs.H.transpose();
  const Eigen::MatrixXd denom = hch + obs.Gamma;

  // oscillation identity: H xbar_f - H xhat_f = HCH (HCH+Gamma)^-1 (ybar - H xhat_f)
  const Eigen::VectorXd rhs42 =
      hch * spd_solve(denom, (obs.y_bar - h_prior).eval());
  // error identity: H xbar_f - ybar = Gamma (HCH+Gamma)^-1 (H xhat_f - ybar)
  const Eigen::VectorXd rhs43 =
      obs.Gamma * spd_solve(denom, (h_prior - obs.y_bar).eval());

  const double scale42 = rep.oscillation.norm() + rhs42.norm() + 1e-300;
  const double scale43 = rep.post_error.norm() + rhs43.norm() + 1e-300;
  const double r42 = (rep.oscillation - rhs42).norm() / scale42;
  const double r43 = (rep.post_error - rhs43).norm() / scale43;
  rep.identity_residual = std::max(r42, r43);
  return rep;
}

Theorem1Bounds theorem1_bound(double M, double sigma_sq) {
  const double c = 2.0 * std::sqrt(2.0);
  return Theorem1Bounds{c * M * sigma_sq, c * M * M * sigma_sq};
}

EvolutionMatrix evolution_matrix(const Eigen::MatrixXd& grad_f,
                                 const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& K) {
  const Eigen::Index d_theta = K.rows();
  const Eigen::Index d_y = K.cols();
  if (H.cols() != grad_f.rows() || grad_f.cols() != d_theta ||
      H.rows() != d_y)
    throw DimensionMismatch("evolution_matrix: inconsistent shapes");

  const Eigen::MatrixXd b = H * grad_f;  // d_y x d_theta
  EvolutionMatrix out;
  out.A.resize(d_theta + d_y, d_theta + d_y);
  out.A.topLeftCorner(d_theta, d_theta) =
      Eigen::MatrixXd::Identity(d_theta, d_theta);
  out.A.topRightCorner(d_theta, d_y) = -K;
  out.A.bottomLeftCorner(d_y, d_theta) = b;
  out.A.bottomRightCorner(d_y, d_y) = -b * K;

  Eigen::EigenSolver<Eigen::MatrixXd> es(out.A);
  out.eigenvalues.resize(static_cast<std::size_t>(out.A.rows()));
  for (Eigen::Index i = 0; i < out.A.rows(); ++i)
    out.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b2) {
              return std::abs(a) < std::abs(b2);
            });
  return out;
}

GradientNormBound gradient_norm_bound(const ForwardModel& model,
                                      const Box& region, int grid) {
  if (grid < 2) throw DimensionMismatch("gradient_norm_bound: grid < 2");
  const Eigen::Index d = region.lo.size();
  auto grad = [&](const Eigen::VectorXd& theta) {
    return model.has_gradient() ? model.gradient(theta)
                                : finite_difference_gradient(model, theta);
  };

  GradientNormBound best;
  best.argmax = region.lo;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd theta(d);
  const long total = static_cast<long>(std::pow(grid, static_cast<int>(d)));
  for (long n = 0; n < total; ++n) {
    long rem = n;
    for (Eigen::Index i = 0; i < d; ++i) {
      const int k = static_cast<int>(rem % grid);
      rem /= grid;
      theta(i) = region.lo(i) +
                 (region.hi(i) - region.lo(i)) * k / (grid - 1.0);
    }
    const double s = grad(theta).jacobiSvd().singularValues()(0);
    if (s > best.value) {
      best.value = s;
      best.argmax = theta;
    }
  }
  return best;
}

}  // namespace enki
