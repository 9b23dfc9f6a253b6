#pragma once

#include <Eigen/Dense>

#include "enki/errors.hpp"

namespace enki {

/// Fixed-order pairwise sum of the columns of `m` (left-to-right halving).
/// Used for ensemble means so that repeated runs are bit-reproducible and
/// rounding does not depend on vectorization width.
Eigen::VectorXd pairwise_col_sum(const Eigen::MatrixXd& m);

double frobenius_norm(const Eigen::MatrixXd& a);

/// Solve AX = B for symmetric positive (semi)definite A via LDLT.
/// One retry with diagonal jitter 1e-12 * trace(A)/d; throws SingularSystem
/// (carrying the smallest eigenvalue) if the system is still singular.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct PrincipalSqrt {
  Eigen::MatrixXd s;  // symmetric, S*S = A on the retained subspace
  int rank;
};

/// Symmetric principal square root, truncating eigenvalues below
/// rank_tol * lambda_max. Throws NotPsd for eigenvalues below
/// -rank_tol * lambda_max.
PrincipalSqrt principal_sqrt(const Eigen::MatrixXd& a, double rank_tol = 1e-12);

/// Pseudo-inverse of the principal square root over the same retained
/// subspace; returns the whitening transform and the retained rank.
PrincipalSqrt principal_inv_sqrt(const Eigen::MatrixXd& a,
                                 double rank_tol = 1e-12);

/// Rank at the same eigenvalue cutoff used by principal_sqrt.
int symmetric_rank(const Eigen::MatrixXd& a, double rank_tol = 1e-12);

}  // namespace enki
