#include "enki/resampling.hpp"

#include <cmath>

#include "enki/linalg.hpp"

namespace enki {

namespace {

double draw_one(BaseDistribution base, RngStream& rng) {
  switch (base) {
    case BaseDistribution::Uniform: {
      const double a = std::sqrt(3.0);
      return a * (2.0 * rng.uniform01() - 1.0);
    }
    case BaseDistribution::Gaussian:
      return rng.normal();
    case BaseDistribution::Laplace: {
      // inverse CDF, scale b = 1/sqrt(2) so the variance is 1
      const double b = 1.0 / std::sqrt(2.0);
      const double u = rng.uniform01() - 0.5;
      const double mag = std::log(1.0 - 2.0 * std::abs(u));
      return u >= 0.0 ? -b * mag : b * mag;
    }
  }
  return 0.0;
}

}  // namespace

Eigen::MatrixXd sample_base(BaseDistribution base, Eigen::Index J,
                            Eigen::Index d, RngStream& rng) {
  if (J < 2) throw DimensionMismatch("sample_base: J must be >= 2");
  Eigen::MatrixXd draws(d, J);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index i = 0; i < d; ++i) draws(i, j) = draw_one(base, rng);
  return draws;
}

Eigen::VectorXd empirical_kurtosis(const Eigen::MatrixXd& draws) {
  const double J = static_cast<double>(draws.cols());
  Eigen::VectorXd kurt(draws.rows());
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const double mean = draws.row(i).mean();
    const Eigen::ArrayXd dev = draws.row(i).array() - mean;
    const double m2 = dev.square().sum() / J;
    const double m4 = dev.square().square().sum() / J;
    kurt(i) = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  }
  return kurt;
}

std::pair<Ensemble, ResampleReport> moment_matched_resample(
    const Ensemble& theta, const ResamplingPolicy& policy, RngStream& rng) {
  ResampleReport report;
  report.raw_kurtosis = Eigen::VectorXd::Zero(theta.dim());

  const Eigen::VectorXd mean_pre = theta.mean();
  const Eigen::MatrixXd cov_pre =
      cross_covariance(theta, theta, DivisorConvention::PopulationJ).data;
  report.sigma_sq = cov_pre.trace();

  if (policy.mode == ResampleMode::Off) return {theta, report};

  const PrincipalSqrt target = principal_sqrt(cov_pre, policy.rank_tol);
  if (target.rank == 0) {
    // collapsed ensemble: sigma_t = 0, resampling is the identity
    return {theta, report};
  }

  const Eigen::Index J = theta.size();
  const Eigen::Index d = theta.dim();

  Eigen::MatrixXd raw;
  Eigen::MatrixXd centered;
  PrincipalSqrt whiten{Eigen::MatrixXd(), 0};
  for (int attempt = 0; attempt < 2; ++attempt) {
    raw = sample_base(policy.base, J, d, rng);
    centered = raw.colwise() - (pairwise_col_sum(raw) / static_cast<double>(J)).eval();
    const Eigen::MatrixXd cov_raw =
        centered * centered.transpose() / static_cast<double>(J);
    whiten = principal_inv_sqrt(cov_raw, policy.rank_tol);
    if (whiten.rank >= target.rank) break;
    if (attempt == 1)
      throw RankDeficientResample(
          "moment_matched_resample: base draws rank-deficient below target "
          "rank after retry");
  }

  report.raw_kurtosis = empirical_kurtosis(raw);

  Eigen::MatrixXd members =
      (target.s * (whiten.s * centered)).colwise() + mean_pre;
  Ensemble out(std::move(members));

  const Eigen::VectorXd mean_post = out.mean();
  const Eigen::MatrixXd cov_post =
      cross_covariance(out, out, DivisorConvention::PopulationJ).data;
  report.mean_error = (mean_post - mean_pre).norm();
  report.cov_error = (cov_post - cov_pre).norm();
  return {out, report};
}

double resample_deviation_stats(const Ensemble& pre, const Ensemble& post) {
  if (pre.size() != post.size() || pre.dim() != post.dim())
    throw DimensionMismatch("resample_deviation_stats: shape mismatch");
  return (post.members() - pre.members()).squaredNorm() /
         static_cast<double>(pre.size());
}

}  // namespace enki
