#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "enki/ensemble.hpp"
#include "enki/kalman.hpp"
#include "enki/problems.hpp"
#include "enki/resampling.hpp"

namespace enki {

/// Per-iteration diagnostics. The first block of fields is what trace.csv
/// emits; the remaining fields feed the analytical checks.
struct IterationRecord {
  int t = 0;
  double norm_C_theta_theta = 0.0;
  double norm_C_theta_Hx = 0.0;
  double norm_C_Hx_Hx = 0.0;
  double norm_K = 0.0;
  double innovation = 0.0;  // squared, as in the stopping rule
  Eigen::VectorXd theta_mean;
  Eigen::VectorXd x_prior_mean;
  Eigen::VectorXd x_post_mean;
  double gain_delta_after_resample = 0.0;  // ||K_before - K_after||_F
  double sigma_sq = 0.0;                   // trace of posterior theta covariance

  // analytical-check extras (not part of the CSV schema)
  double lambda_min_HCHt = 0.0;   // smallest eigenvalue of H C_xx H^T (prior)
  double sigma_sq_max = 0.0;      // largest eigenvalue of pre-resample theta cov
  double resample_dev_thetax = 0.0;  // ||C_{theta_r,x_r} - C_{theta,x}||_F
  double resample_dev_xx = 0.0;      // ||C_{x_r,x_r} - C_{x,x}||_F
  double norm_C_theta_x_full = 0.0;  // pre-resample ||C_{theta,x}||_F
  double norm_C_xx_full = 0.0;       // pre-resample ||C_{x,x}||_F
};

struct SteadyStateReport {
  Eigen::VectorXd oscillation;  // H x_post_mean - H x_prior_mean
  Eigen::VectorXd prior_error;  // H x_prior_mean - y_bar
  Eigen::VectorXd post_error;   // H x_post_mean - y_bar
  double identity_residual = 0.0;
};

IterationRecord record_iteration(const IterationState& state,
                                 const KalmanGains& gains,
                                 const UpdateResult& post,
                                 const ObservationSpec& obs,
                                 const ForwardModel& model,
                                 DivisorConvention conv =
                                     DivisorConvention::PopulationJ);

/// One step of the parameter-covariance recursion:
/// C - C_tHx (C_HxHx + Gamma)^-1 C_tHx^T.
Eigen::MatrixXd covariance_recursion_step(const Eigen::MatrixXd& c_tt,
                                          const Eigen::MatrixXd& c_tHx,
                                          const Eigen::MatrixXd& c_HxHx,
                                          const Eigen::MatrixXd& gamma);

/// (alpha / (delta + alpha))^t * norm_C1.
double shrinkage_bound(double alpha, double delta, int t, double norm_C1);

struct ShrinkageStepResult {
  int t = 0;
  double factor = 0.0;  // alpha / (lambda_min + alpha)
  double lhs = 0.0;     // ||C_{Hx,theta}||_F at t+1
  double rhs = 0.0;     // factor * ||C_{Hx,theta}||_F at t
  bool pass = false;
};

/// Per-step contraction check for an update-only trace; lambda_min per step
/// comes from the recorded H C_xx H^T spectrum.
std::vector<ShrinkageStepResult> check_per_step_shrinkage(
    const std::vector<IterationRecord>& trace, double alpha);

SteadyStateReport steady_state_check(const Eigen::VectorXd& x_prior_mean,
                                     const Eigen::VectorXd& x_post_mean,
                                     const Eigen::MatrixXd& c_xx,
                                     const ObservationSpec& obs);

struct Theorem1Bounds {
  double bound_thetax = 0.0;  // 2 sqrt(2) M sigma^2
  double bound_xx = 0.0;      // 2 sqrt(2) M^2 sigma^2
};

Theorem1Bounds theorem1_bound(double M, double sigma_sq);

struct EvolutionMatrix {
  Eigen::MatrixXd A;  // (d_theta + d_y) square
  std::vector<std::complex<double>> eigenvalues;  // sorted by modulus
};

/// Block matrix [[I, -K], [H grad_f, -H grad_f K]] and its spectrum.
EvolutionMatrix evolution_matrix(const Eigen::MatrixXd& grad_f,
                                 const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& K);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct GradientNormBound {
  double value = 0.0;           // max spectral norm over the lattice
  Eigen::VectorXd argmax;       // maximizing theta (lower estimate of the sup)
};

/// Max of ||grad f(theta)||_2 over a grid^d lattice covering `region`.
GradientNormBound gradient_norm_bound(const ForwardModel& model,
                                      const Box& region, int grid);

}  // namespace enki
