#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "enki/diagnostics.hpp"
#include "enki/kalman.hpp"
#include "enki/problems.hpp"
#include "enki/resampling.hpp"

namespace enki {

struct SolverConfig {
  Eigen::Index J = 100;
  double tol = 1e-5;  // threshold on the squared innovation
  int max_iter = 5000;
  std::uint64_t seed = 1;
  ResamplingPolicy resampling;
  bool fixed_perturbations = false;  // freeze the t=1 observation draws
  bool mean_observations = false;    // obs draws frozen to y_bar (diagnostics)
  bool update_only = false;          // skip the prediction stage
  DivisorConvention covariance_divisor = DivisorConvention::PopulationJ;
  int stagnation_window = 50;
  double stagnation_gain_eps = 1e-6;

  void validate() const;
};

enum class SolverStatus { ConvergedInnovation, EarlyStopped, MaxIterations };

const char* to_string(SolverStatus s);

struct SolverResult {
  Eigen::VectorXd theta_hat;  // final posterior ensemble mean
  SolverStatus status = SolverStatus::MaxIterations;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  std::optional<SteadyStateReport> steady_state;
  std::optional<int> fixed_point_t;
  // box hull of every visited theta member, for gradient-bound estimates
  Box theta_hull;
};

/// Gaussian initial ensemble from the problem's init moments; the state
/// ensemble is the member-wise forward image.
IterationState initialize(const ProblemInstance& problem,
                          const SolverConfig& config, RngStream& rng);

/// Full iteration loop: perturb -> gains -> update -> [resample] ->
/// predict, with the innovation stopping rule and stagnation detection.
SolverResult run(const ProblemInstance& problem, const SolverConfig& config);

/// Smallest t whose next `window` steps all move the posterior mean by less
/// than `eps`.
std::optional<int> detect_fixed_point(const std::vector<IterationRecord>& trace,
                                      double eps = 1e-10, int window = 10);

}  // namespace enki
