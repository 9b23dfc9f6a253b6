#pragma once

#include <Eigen/Dense>

#include "enki/ensemble.hpp"
#include "enki/rng.hpp"

namespace enki {

enum class ResampleMode { Off, EveryIteration };
enum class BaseDistribution { Uniform, Gaussian, Laplace };

struct ResamplingPolicy {
  ResampleMode mode = ResampleMode::Off;
  BaseDistribution base = BaseDistribution::Gaussian;
  double rank_tol = 1e-12;
};

struct ResampleReport {
  double mean_error = 0.0;          // ||mean_post - mean_pre||
  double cov_error = 0.0;           // Frobenius, retained-rank subspace
  Eigen::VectorXd raw_kurtosis;     // per coordinate of the raw base draws
  double sigma_sq = 0.0;            // trace of the pre-resample covariance
};

/// Standardized i.i.d. base draws as a d x J matrix. Uniform on
/// [-sqrt(3), sqrt(3)], standard Gaussian, or Laplace with scale 1/sqrt(2);
/// all have zero mean and unit variance per coordinate, with kurtosis
/// 1.8 / 3 / 6 respectively.
Eigen::MatrixXd sample_base(BaseDistribution base, Eigen::Index J,
                            Eigen::Index d, RngStream& rng);

/// Redraw the ensemble from the base distribution, then affinely correct so
/// the sample mean and sample covariance match the input's exactly (up to
/// floating point, on the retained-rank subspace).
std::pair<Ensemble, ResampleReport> moment_matched_resample(
    const Ensemble& theta, const ResamplingPolicy& policy, RngStream& rng);

/// (1/J) sum ||post_j - pre_j||^2; in expectation 2 sigma_t^2 for an
/// independent moment-matched redraw.
double resample_deviation_stats(const Ensemble& pre, const Ensemble& post);

/// Per-coordinate empirical kurtosis m4 / m2^2 of the columns of `draws`.
Eigen::VectorXd empirical_kurtosis(const Eigen::MatrixXd& draws);

}  // namespace enki
