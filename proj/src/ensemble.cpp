#include "enki/ensemble.hpp"

namespace enki {

Eigen::VectorXd ensemble_mean(const Ensemble& e) { return e.mean(); }

CovMatrix cross_covariance(const Ensemble& a, const Ensemble& b,
                           DivisorConvention conv) {
  if (a.size() != b.size())
    throw DimensionMismatch("cross_covariance: ensemble sizes differ");
  const Eigen::MatrixXd da = a.deviations();
  const Eigen::MatrixXd db = b.deviations();
  const double div = conv == DivisorConvention::PopulationJ
                         ? static_cast<double>(a.size())
                         : static_cast<double>(a.size() - 1);
  return CovMatrix{(da * db.transpose()) / div, conv};
}

}  // namespace enki
