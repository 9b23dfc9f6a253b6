#include "enki/problems.hpp"

#include <cmath>

namespace enki {

ForwardModel gaussian_bumps_model() {
  ForwardModel m;
  m.d_theta = 2;
  m.d_x = 2;
  m.eval = [](const Eigen::VectorXd& theta) {
    Eigen::VectorXd x(2);
    x(0) = std::exp(-(theta(0) + 1.0) * (theta(0) + 1.0) -
                    (theta(1) + 1.0) * (theta(1) + 1.0));
    x(1) = std::exp(-(theta(0) - 1.0) * (theta(0) - 1.0) -
                    (theta(1) - 1.0) * (theta(1) - 1.0));
    return x;
  };
  m.gradient = [eval = m.eval](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd x = eval(theta);
    Eigen::MatrixXd g(2, 2);
    g(0, 0) = -2.0 * (theta(0) + 1.0) * x(0);
    g(0, 1) = -2.0 * (theta(1) + 1.0) * x(0);
    g(1, 0) = -2.0 * (theta(0) - 1.0) * x(1);
    g(1, 1) = -2.0 * (theta(1) - 1.0) * x(1);
    return g;
  };
  return m;
}

ProblemInstance gaussian_bumps_problem(const GaussianBumpsOptions& opt) {
  ProblemInstance p;
  p.id = "gaussian_bumps";
  p.model = gaussian_bumps_model();
  Eigen::MatrixXd H(1, 2);
  H << -1.5, -1.0;
  Eigen::VectorXd y_bar(1);
  y_bar << opt.y_bar;
  p.obs = ObservationSpec::scalar_noise(H, y_bar, opt.gamma);
  p.init_mean = opt.init_mean;
  p.init_cov = opt.init_cov_scale * Eigen::MatrixXd::Identity(2, 2);
  return p;
}

ForwardModel linear_model(Eigen::MatrixXd F) {
  ForwardModel m;
  m.d_theta = F.cols();
  m.d_x = F.rows();
  m.eval = [F](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    return F * theta;
  };
  m.gradient = [F](const Eigen::VectorXd&) { return F; };
  return m;
}

Eigen::MatrixXd finite_difference_gradient(const ForwardModel& model,
                                           const Eigen::VectorXd& theta,
                                           double h) {
  if (h <= 0.0) throw DimensionMismatch("finite_difference_gradient: h <= 0");
  Eigen::MatrixXd g(model.d_x, model.d_theta);
  Eigen::VectorXd t = theta;
  for (Eigen::Index i = 0; i < model.d_theta; ++i) {
    const double orig = t(i);
    t(i) = orig + h;
    const Eigen::VectorXd fp = model.eval(t);
    t(i) = orig - h;
    const Eigen::VectorXd fm = model.eval(t);
    t(i) = orig;
    g.col(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace enki
