#pragma once

#include <stdexcept>
#include <string>

namespace enki {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Symmetric solve failed even after the diagonal jitter retry.
struct SingularSystem : std::runtime_error {
  double smallest_eigenvalue;
  explicit SingularSystem(double lambda_min)
      : std::runtime_error("singular symmetric system, smallest eigenvalue " +
                           std::to_string(lambda_min)),
        smallest_eigenvalue(lambda_min) {}
};

struct NotPsd : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficientResample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Forward-model evaluation failed for a specific ensemble member.
struct ModelEvalError : std::runtime_error {
  int member;
  ModelEvalError(int j, const std::string& what)
      : std::runtime_error("forward model failed for member " +
                           std::to_string(j) + ": " + what),
        member(j) {}
};

}  // namespace enki
