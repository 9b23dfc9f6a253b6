#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "enki/kalman.hpp"
#include "enki/problems.hpp"
#include "enki/rng.hpp"
#include "enki/solver.hpp"

using namespace enki;

namespace {

Ensemble gaussian_ensemble(int d, int J, std::uint64_t seed,
                           double scale = 1.0) {
  RngStream rng(seed);
  Eigen::MatrixXd m(d, J);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < J; ++j) m(i, j) = scale * rng.normal();
  return Ensemble(m);
}

}  // namespace

TEST_CASE("zero observation noise produces exact copies of y_bar") {
  ObservationSpec obs;
  obs.H = Eigen::MatrixXd::Identity(2, 2);
  obs.y_bar = Eigen::Vector2d(1.0, -2.0);
  obs.Gamma = Eigen::MatrixXd::Zero(2, 2);
  RngStream rng(1);
  Ensemble draws = perturb_observations(obs, 16, rng);
  for (int j = 0; j < 16; ++j)
    CHECK((draws.member(j) - obs.y_bar).norm() == 0.0);
}

TEST_CASE("observation draws match the noise moments at large J") {
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, -1.0),
      0.01);
  const Eigen::Index J = 100000;
  RngStream rng(2);
  Ensemble draws = perturb_observations(obs, J, rng);
  const double mean = draws.mean()(0);
  CHECK(std::abs(mean - (-1.0)) < 4.0 / std::sqrt(static_cast<double>(J)));
  const double var = cross_covariance(draws, draws).data(0, 0);
  CHECK(var == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("scalar gain arithmetic") {
  // theta = x = {-1, 1}: unit variances and cross covariance, so with
  // H = 1 and Gamma = 1 both gains equal 1 / (1 + 1) = 0.5
  Eigen::MatrixXd m(1, 2);
  m << -1.0, 1.0;
  Ensemble theta(m), x(m);
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 1.0);
  KalmanGains g = compute_gains(theta, x, obs);
  CHECK(g.K(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.K_prime(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("uncorrelated parameters receive a zero gain") {
  Eigen::MatrixXd tm = Eigen::MatrixXd::Constant(1, 4, 3.0);  // no spread
  Eigen::MatrixXd xm(1, 4);
  xm << -1, 0, 1, 2;
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 0.5);
  KalmanGains g = compute_gains(Ensemble(tm), Ensemble(xm), obs);
  CHECK(g.K.norm() == 0.0);
}

TEST_CASE("gains agree with an explicit dense inverse") {
  ProblemInstance p = gaussian_bumps_problem();
  SolverConfig cfg;
  cfg.J = 40;
  RngStream rng(3);
  IterationState s = initialize(p, cfg, rng);
  KalmanGains g = compute_gains(s.theta_prior, s.x_prior, p.obs);

  Eigen::MatrixXd c_tx = cross_covariance(s.theta_prior, s.x_prior).data;
  Eigen::MatrixXd c_xx = cross_covariance(s.x_prior, s.x_prior).data;
  Eigen::MatrixXd denom = p.obs.H * c_xx * p.obs.H.transpose() + p.obs.Gamma;
  Eigen::MatrixXd k_ref = c_tx * p.obs.H.transpose() * denom.inverse();
  Eigen::MatrixXd kp_ref = c_xx * p.obs.H.transpose() * denom.inverse();
  CHECK((g.K - k_ref).norm() < 1e-9);
  CHECK((g.K_prime - kp_ref).norm() < 1e-9);
}

TEST_CASE("update with draws equal to the observed members is the identity") {
  Ensemble theta = gaussian_ensemble(2, 12, 4);
  Ensemble x = gaussian_ensemble(3, 12, 5);
  Eigen::MatrixXd h(1, 3);
  h << 1.0, -0.5, 2.0;
  ObservationSpec obs = ObservationSpec::scalar_noise(
      h, Eigen::VectorXd::Zero(1), 0.1);
  KalmanGains g = compute_gains(theta, x, obs);
  Ensemble draws(h * x.members());  // y_j = H x_j exactly
  UpdateResult r = update_stage(theta, x, draws, obs, g);
  CHECK((r.theta_post.members() - theta.members()).norm() == 0.0);
  CHECK((r.x_post.members() - x.members()).norm() == 0.0);
}

TEST_CASE("scalar update arithmetic with a hand-set gain") {
  Eigen::MatrixXd tm(1, 2), xm(1, 2), ym(1, 2);
  tm << 1.0, 3.0;
  xm << 2.0, 0.0;
  ym << 4.0, 4.0;
  KalmanGains g;
  g.K = Eigen::MatrixXd::Constant(1, 1, 0.5);
  g.K_prime = Eigen::MatrixXd::Constant(1, 1, 0.25);
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 1.0);
  UpdateResult r =
      update_stage(Ensemble(tm), Ensemble(xm), Ensemble(ym), obs, g);
  // theta_j + 0.5 (y_j - x_j): 1 + 0.5*2 = 2, 3 + 0.5*4 = 5
  CHECK(r.theta_post.members()(0, 0) == doctest::Approx(2.0));
  CHECK(r.theta_post.members()(0, 1) == doctest::Approx(5.0));
  // x_j + 0.25 (y_j - x_j): 2 + 0.5 = 2.5, 0 + 1 = 1
  CHECK(r.x_post.members()(0, 0) == doctest::Approx(2.5));
  CHECK(r.x_post.members()(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("one ensemble update reproduces the conjugate posterior mean") {
  // theta ~ N(0,1), x = (theta, theta), observed through H = [1 1] with
  // Gamma = 1 and y_bar = 1: effectively y = 2 theta + noise, so the
  // posterior mean is 4/(4+1) * (1/2) = 0.4
  Eigen::MatrixXd f(2, 1);
  f << 1.0, 1.0;
  ForwardModel m = linear_model(f);
  Eigen::MatrixXd h(1, 2);
  h << 1.0, 1.0;
  ObservationSpec obs = ObservationSpec::scalar_noise(
      h, Eigen::VectorXd::Constant(1, 1.0), 1.0);

  const Eigen::Index J = 100000;
  RngStream rng(6);
  Eigen::MatrixXd tm(1, J);
  for (Eigen::Index j = 0; j < J; ++j) tm(0, j) = rng.normal();
  Ensemble theta(tm);
  IterationState s = prediction_stage(theta, m, 1);
  Ensemble draws = perturb_observations(obs, J, rng);
  KalmanGains g = compute_gains(theta, s.x_prior, obs);
  UpdateResult r = update_stage(theta, s.x_prior, draws, obs, g);
  CHECK(r.theta_post.mean()(0) == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("prediction applies the model member-wise and advances t") {
  ForwardModel m = gaussian_bumps_model();
  Eigen::MatrixXd tm(2, 2);
  tm << -1.0, 1.0, -1.0, 1.0;  // members (-1,-1) and (1,1)
  IterationState s = prediction_stage(Ensemble(tm), m, 7);
  CHECK(s.t == 7);
  CHECK(s.x_prior.members()(0, 0) == doctest::Approx(1.0));
  CHECK(s.x_prior.members()(1, 0) ==
        doctest::Approx(std::exp(-8.0)).epsilon(1e-12));
  CHECK(s.x_prior.members()(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("prediction reports the offending member on non-finite output") {
  ForwardModel m;
  m.d_theta = 1;
  m.d_x = 1;
  m.eval = [](const Eigen::VectorXd& t) {
    return Eigen::VectorXd::Constant(1, t(0) > 1.5 ? std::nan("") : t(0));
  };
  Eigen::MatrixXd tm(1, 3);
  tm << 0.0, 1.0, 2.0;
  try {
    prediction_stage(Ensemble(tm), m, 1);
    FAIL("expected ModelEvalError");
  } catch (const ModelEvalError& e) {
    CHECK(e.member == 2);
  }
}

TEST_CASE("innovation is the squared observed-space gap") {
  Eigen::MatrixXd f(1, 1);
  f << 2.0;
  ForwardModel m = linear_model(f);
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, 5.0), 1.0);
  // theta = 1 -> Hf = 2, gap = 3, squared 9
  CHECK(innovation_norm(Eigen::VectorXd::Constant(1, 1.0), m, obs) ==
        doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("posterior covariance identity under deterministic draws") {
  Ensemble theta = gaussian_ensemble(2, 25, 8);
  Ensemble x = gaussian_ensemble(2, 25, 9);
  Eigen::MatrixXd h(1, 2);
  h << 1.5, 1.0;
  ObservationSpec obs = ObservationSpec::scalar_noise(
      h, Eigen::VectorXd::Constant(1, -1.0), 0.01);
  KalmanGains g = compute_gains(theta, x, obs);
  // constant draws: every member receives y_bar
  Ensemble draws(obs.y_bar.replicate(1, theta.size()));
  UpdateResult r = update_stage(theta, x, draws, obs, g);

  Eigen::MatrixXd c_tt = cross_covariance(theta, theta).data;
  Ensemble hx(h * x.members());
  Eigen::MatrixXd c_thx = cross_covariance(theta, hx).data;
  Eigen::MatrixXd c_hxhx = cross_covariance(hx, hx).data;
  Eigen::MatrixXd expected = c_tt - g.K * c_thx.transpose() -
                             c_thx * g.K.transpose() +
                             g.K * c_hxhx * g.K.transpose();
  Eigen::MatrixXd actual =
      cross_covariance(r.theta_post, r.theta_post).data;
  CHECK((actual - expected).norm() < 1e-10);
}

TEST_CASE("zero gains leave the ensemble means unchanged") {
  Ensemble theta = gaussian_ensemble(2, 10, 10);
  Ensemble x = gaussian_ensemble(1, 10, 11);
  ObservationSpec obs = ObservationSpec::scalar_noise(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 1.0);
  KalmanGains g;
  g.K = Eigen::MatrixXd::Zero(2, 1);
  g.K_prime = Eigen::MatrixXd::Zero(1, 1);
  RngStream rng(12);
  Ensemble draws = perturb_observations(obs, 10, rng);
  UpdateResult r = update_stage(theta, x, draws, obs, g);
  CHECK((r.theta_post.mean() - theta.mean()).norm() < 1e-14);
  CHECK((r.x_post.mean() - x.mean()).norm() < 1e-14);
}
