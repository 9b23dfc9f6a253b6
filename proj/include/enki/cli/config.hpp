#pragma once

#include <string>

#include "enki/problems.hpp"
#include "enki/solver.hpp"

namespace enki::cli {

/// Fully resolved experiment definition: problem + solver settings.
struct RunConfig {
  std::string problem_id;  // "gaussian_bumps" or "linear"
  SolverConfig solver;

  // problem parameters (all overridable in the config file)
  Eigen::VectorXd init_mean;
  Eigen::MatrixXd init_cov;
  double init_cov_scale = -1.0;  // scalar config form: scale * identity
  double gamma = 0.01;
  Eigen::VectorXd y_bar;
  Eigen::MatrixXd F;  // linear problem only
  Eigen::MatrixXd H;  // required for linear; fixed for gaussian_bumps

  ProblemInstance build_problem() const;
};

/// Parse and validate a JSON config. Unknown keys are errors; messages name
/// the offending field path. ENKI_SEED in the environment overrides `seed`.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

std::string resampling_name(const ResamplingPolicy& p);

}  // namespace enki::cli
