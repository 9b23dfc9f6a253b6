#pragma once

#include <Eigen/Dense>

#include "enki/errors.hpp"
#include "enki/linalg.hpp"

namespace enki {

enum class DivisorConvention { PopulationJ, SampleJminus1 };

/// A J-member collection of d-dimensional vectors, stored as the columns of
/// a d x J matrix.
class Ensemble {
 public:
  Ensemble(Eigen::MatrixXd members) : members_(std::move(members)) {
    if (members_.cols() < 2)
      throw DimensionMismatch("Ensemble: J must be >= 2");
    if (members_.rows() < 1)
      throw DimensionMismatch("Ensemble: d must be >= 1");
  }

  Eigen::Index dim() const { return members_.rows(); }
  Eigen::Index size() const { return members_.cols(); }

  const Eigen::MatrixXd& members() const { return members_; }
  Eigen::VectorXd member(Eigen::Index j) const { return members_.col(j); }

  /// Arithmetic mean, fixed pairwise summation order.
  Eigen::VectorXd mean() const {
    return pairwise_col_sum(members_) / static_cast<double>(size());
  }

  /// Member deviations from the ensemble mean, as columns.
  Eigen::MatrixXd deviations() const {
    return members_.colwise() - mean().eval();
  }

 private:
  Eigen::MatrixXd members_;
};

struct CovMatrix {
  Eigen::MatrixXd data;
  DivisorConvention divisor = DivisorConvention::PopulationJ;
};

Eigen::VectorXd ensemble_mean(const Ensemble& e);

/// (1/J) sum (a_j - abar)(b_j - bbar)^T, or 1/(J-1) under SampleJminus1.
CovMatrix cross_covariance(const Ensemble& a, const Ensemble& b,
                           DivisorConvention conv =
                               DivisorConvention::PopulationJ);

/// Observation operator, mean observation and noise covariance.
struct ObservationSpec {
  Eigen::MatrixXd H;      // d_y x d_x
  Eigen::VectorXd y_bar;  // d_y
  Eigen::MatrixXd Gamma;  // d_y x d_y, symmetric PSD

  static ObservationSpec scalar_noise(Eigen::MatrixXd H, Eigen::VectorXd y_bar,
                                      double alpha) {
    if (alpha <= 0.0)
      throw DimensionMismatch("ObservationSpec: alpha must be positive");
    const Eigen::Index dy = H.rows();
    return ObservationSpec{std::move(H), std::move(y_bar),
                           alpha * Eigen::MatrixXd::Identity(dy, dy)};
  }
};

}  // namespace enki
