#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "enki/ensemble.hpp"

namespace enki {

/// Deterministic map from parameters theta to system state x, with an
/// optional analytic Jacobian.
struct ForwardModel {
  Eigen::Index d_theta = 0;
  Eigen::Index d_x = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gradient;  // optional

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

struct ProblemInstance {
  std::string id;
  ForwardModel model;
  ObservationSpec obs;
  Eigen::VectorXd init_mean;
  Eigen::MatrixXd init_cov;
};

/// Two Gaussian bumps centered at (-1,-1) and (1,1); outputs lie in (0, 1].
ForwardModel gaussian_bumps_model();

struct GaussianBumpsOptions {
  // the origin lies in the attraction basin of the minima circling (-1,-1),
  // where the forward map has an order-one gradient; starts in the far
  // upper-right instead drift onto the nearly flat bump top at (1,1)
  Eigen::Vector2d init_mean{0.0, 0.0};
  double init_cov_scale = 0.25;
  double gamma = 0.01;
  double y_bar = -1.0;
};

ProblemInstance gaussian_bumps_problem(
    const GaussianBumpsOptions& opt = GaussianBumpsOptions{});

ForwardModel linear_model(Eigen::MatrixXd F);

/// Central differences (f(theta + h e_i) - f(theta - h e_i)) / 2h per column.
Eigen::MatrixXd finite_difference_gradient(const ForwardModel& model,
                                           const Eigen::VectorXd& theta,
                                           double h = 1e-5);

}  // namespace enki
