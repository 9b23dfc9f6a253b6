#include "enki/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "enki/linalg.hpp"

namespace enki {

void SolverConfig::validate() const {
  if (J < 2) throw std::invalid_argument("SolverConfig: J must be >= 2");
  if (max_iter < 1)
    throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
  if (stagnation_window < 2)
    throw std::invalid_argument("SolverConfig: stagnation_window must be >= 2");
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::ConvergedInnovation:
      return "converged_innovation";
    case SolverStatus::EarlyStopped:
      return "early_stopped";
    case SolverStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

IterationState initialize(const ProblemInstance& problem,
                          const SolverConfig& config, RngStream& rng) {
  config.validate();
  const Eigen::Index d = problem.init_mean.size();
  const Eigen::MatrixXd s = principal_sqrt(problem.init_cov).s;
  Eigen::MatrixXd xi(d, config.J);
  for (Eigen::Index j = 0; j < config.J; ++j)
    for (Eigen::Index i = 0; i < d; ++i) xi(i, j) = rng.normal();
  Eigen::MatrixXd members = (s * xi).colwise() + problem.init_mean;
  return prediction_stage(Ensemble(std::move(members)), problem.model, 1);
}

namespace {

void grow_hull(Box& hull, const Eigen::MatrixXd& members) {
  if (hull.lo.size() == 0) {
    hull.lo = members.rowwise().minCoeff();
    hull.hi = members.rowwise().maxCoeff();
    return;
  }
  hull.lo = hull.lo.cwiseMin(members.rowwise().minCoeff());
  hull.hi = hull.hi.cwiseMax(members.rowwise().maxCoeff());
}

Ensemble mean_observation_ensemble(const ObservationSpec& obs, Eigen::Index J) {
  Eigen::MatrixXd draws(obs.y_bar.size(), J);
  draws.colwise() = obs.y_bar;
  return Ensemble(std::move(draws));
}

}  // namespace

SolverResult run(const ProblemInstance& problem, const SolverConfig& config) {
  config.validate();
  RngStream master(config.seed);
  RngStream rng_init = master.substream(0);
  RngStream rng_obs_root = master.substream(1);
  RngStream rng_resample_root = master.substream(2);

  SolverResult result;
  IterationState state = initialize(problem, config, rng_init);
  grow_hull(result.theta_hull, state.theta_prior.members());

  std::optional<Ensemble> frozen_draws;
  int stagnant = 0;
  bool resampling_on =
      config.resampling.mode == ResampleMode::EveryIteration;

  // kept for the steady-state check at the end of the run
  Eigen::MatrixXd last_prior_cxx;
  Eigen::VectorXd last_prior_mean, last_post_mean;

  for (int t = 1; t <= config.max_iter; ++t) {
    Ensemble obs_draws = [&]() -> Ensemble {
      if (config.mean_observations)
        return mean_observation_ensemble(problem.obs, config.J);
      if (config.fixed_perturbations) {
        if (!frozen_draws) {
          RngStream r = rng_obs_root.substream(1);
          frozen_draws = perturb_observations(problem.obs, config.J, r);
        }
        return *frozen_draws;
      }
      RngStream r = rng_obs_root.substream(static_cast<std::uint64_t>(t));
      return perturb_observations(problem.obs, config.J, r);
    }();

    KalmanGains gains;
    UpdateResult post{state.theta_prior, state.x_prior};
    IterationRecord rec;
    try {
      gains = compute_gains(state.theta_prior, state.x_prior, problem.obs,
                            config.covariance_divisor);
      post = update_stage(state.theta_prior, state.x_prior, obs_draws,
                          problem.obs, gains);
      rec = record_iteration(state, gains, post, problem.obs, problem.model,
                             config.covariance_divisor);
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(t) + ": " +
                               e.what());
    }

    last_prior_cxx = cross_covariance(state.x_prior, state.x_prior,
                                      config.covariance_divisor)
                         .data;
    last_prior_mean = rec.x_prior_mean;
    last_post_mean = rec.x_post_mean;

    grow_hull(result.theta_hull, post.theta_post.members());

    Ensemble theta_next = post.theta_post;
    std::optional<Ensemble> x_next;
    if (resampling_on) {
      RngStream r = rng_resample_root.substream(static_cast<std::uint64_t>(t));
      auto [theta_r, rep] =
          moment_matched_resample(post.theta_post, config.resampling, r);

      IterationState before = prediction_stage(post.theta_post, problem.model, t);
      IterationState after = prediction_stage(theta_r, problem.model, t);

      const Eigen::MatrixXd c_tx_before =
          cross_covariance(post.theta_post, before.x_prior,
                           config.covariance_divisor)
              .data;
      const Eigen::MatrixXd c_xx_before =
          cross_covariance(before.x_prior, before.x_prior,
                           config.covariance_divisor)
              .data;
      const Eigen::MatrixXd c_tx_after =
          cross_covariance(theta_r, after.x_prior, config.covariance_divisor)
              .data;
      const Eigen::MatrixXd c_xx_after =
          cross_covariance(after.x_prior, after.x_prior,
                           config.covariance_divisor)
              .data;
      rec.resample_dev_thetax = (c_tx_after - c_tx_before).norm();
      rec.resample_dev_xx = (c_xx_after - c_xx_before).norm();
      rec.norm_C_theta_x_full = c_tx_before.norm();
      rec.norm_C_xx_full = c_xx_before.norm();

      const KalmanGains k_before = compute_gains(
          post.theta_post, before.x_prior, problem.obs,
          config.covariance_divisor);
      const KalmanGains k_after = compute_gains(
          theta_r, after.x_prior, problem.obs, config.covariance_divisor);
      rec.gain_delta_after_resample = (k_before.K - k_after.K).norm();

      theta_next = theta_r;
      x_next = after.x_prior;
      grow_hull(result.theta_hull, theta_r.members());
    }

    result.trace.push_back(rec);
    result.iterations = t;
    result.theta_hat = rec.theta_mean;

    if (rec.innovation < config.tol) {
      result.status = SolverStatus::ConvergedInnovation;
      break;
    }

    stagnant = rec.norm_K < config.stagnation_gain_eps ? stagnant + 1 : 0;
    if (stagnant >= config.stagnation_window) {
      result.status = SolverStatus::EarlyStopped;
      break;
    }

    if (t == config.max_iter) {
      result.status = SolverStatus::MaxIterations;
      break;
    }

    if (config.update_only) {
      state = IterationState{theta_next, post.x_post, t + 1};
    } else if (x_next) {
      state = IterationState{theta_next, *x_next, t + 1};
    } else {
      state = prediction_stage(theta_next, problem.model, t + 1);
    }
  }

  result.fixed_point_t = detect_fixed_point(result.trace);
  // the oscillation/error quantities are well defined at any terminal
  // ensemble, so report them for every run; fixed_point_t records whether the
  // mean had genuinely stopped moving
  if (last_prior_cxx.size() > 0) {
    result.steady_state = steady_state_check(last_prior_mean, last_post_mean,
                                             last_prior_cxx, problem.obs);
  }
  return result;
}

std::optional<int> detect_fixed_point(const std::vector<IterationRecord>& trace,
                                      double eps, int window) {
  if (trace.empty()) return std::nullopt;
  const int n = static_cast<int>(trace.size());
  for (int i = 0; i < n; ++i) {
    if (i + window >= n) break;
    bool ok = true;
    for (int s = i + 1; s <= i + window; ++s) {
      if ((trace[static_cast<std::size_t>(s)].theta_mean -
           trace[static_cast<std::size_t>(s - 1)].theta_mean)
              .norm() >= eps) {
        ok = false;
        break;
      }
    }
    if (ok) return trace[static_cast<std::size_t>(i)].t;
  }
  return std::nullopt;
}

}  // namespace enki
