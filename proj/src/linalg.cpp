#include "enki/linalg.hpp"

#include <cmath>

namespace enki {

namespace {

Eigen::VectorXd pairwise_range(const Eigen::MatrixXd& m, Eigen::Index lo,
                               Eigen::Index n) {
  if (n == 1) return m.col(lo);
  if (n == 2) return m.col(lo) + m.col(lo + 1);
  const Eigen::Index half = n / 2;
  return pairwise_range(m, lo, half) + pairwise_range(m, lo + half, n - half);
}

void require_symmetric(const Eigen::MatrixXd& a, double rel_tol,
                       const char* who) {
  if (a.rows() != a.cols()) throw DimensionMismatch(std::string(who) + ": matrix not square");
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale)
    throw DimensionMismatch(std::string(who) + ": matrix not symmetric");
}

}  // namespace

Eigen::VectorXd pairwise_col_sum(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return Eigen::VectorXd::Zero(m.rows());
  return pairwise_range(m, 0, m.cols());
}

double frobenius_norm(const Eigen::MatrixXd& a) { return a.norm(); }

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_symmetric(a, 1e-10, "spd_solve");
  if (a.rows() != b.rows()) throw DimensionMismatch("spd_solve: rhs rows");

  const double bnorm = b.norm();
  auto good = [&](const Eigen::MatrixXd& x) {
    if (!x.allFinite()) return false;
    return (a * x - b).norm() <= 1e-9 * (bnorm + 1e-300);
  };

  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() == Eigen::Success) {
    Eigen::MatrixXd x = ldlt.solve(b);
    if (good(x)) return x;
  }

  // jitter retry
  const double jitter = 1e-12 * a.trace() / static_cast<double>(a.rows());
  Eigen::MatrixXd aj = a;
  aj.diagonal().array() += jitter;
  ldlt.compute(aj);
  if (ldlt.info() == Eigen::Success) {
    Eigen::MatrixXd x = ldlt.solve(b);
    if (good(x)) return x;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  throw SingularSystem(es.eigenvalues().minCoeff());
}

namespace {

PrincipalSqrt sqrt_impl(const Eigen::MatrixXd& a, double rank_tol,
                        bool invert) {
  require_symmetric(a, 1e-8, "principal_sqrt");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw NotPsd("principal_sqrt: eigendecomposition failed");

  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lam_max = lam.size() ? lam.maxCoeff() : 0.0;
  const double cutoff = rank_tol * std::max(lam_max, 0.0);
  if (lam.minCoeff() < -std::max(cutoff, rank_tol))
    throw NotPsd("principal_sqrt: matrix has negative eigenvalue " +
                 std::to_string(lam.minCoeff()));

  Eigen::VectorXd d = Eigen::VectorXd::Zero(lam.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) {
      d(i) = invert ? 1.0 / std::sqrt(lam(i)) : std::sqrt(lam(i));
      ++rank;
    }
  }
  PrincipalSqrt out;
  out.s = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  out.rank = rank;
  return out;
}

}  // namespace

PrincipalSqrt principal_sqrt(const Eigen::MatrixXd& a, double rank_tol) {
  return sqrt_impl(a, rank_tol, false);
}

PrincipalSqrt principal_inv_sqrt(const Eigen::MatrixXd& a, double rank_tol) {
  return sqrt_impl(a, rank_tol, true);
}

int symmetric_rank(const Eigen::MatrixXd& a, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double cutoff = rank_tol * lam_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > cutoff) ++rank;
  return rank;
}

}  // namespace enki
