#pragma once

#include <Eigen/Dense>

#include "consensus/netgraph.hpp"

namespace consensus {

struct SpectralTolerances {
  double residual = 1e-10;       ///< max-norm bound on nu^T L
  double normalization = 1e-12;  ///< |sum(nu) - 1|
};

/// Normalized left null eigenvector of the Laplacian.
struct EigenCentrality {
  Eigen::VectorXd nu;
  double residual = 0.0;  ///< ||nu^T L||_inf
};

/// Solves [L^T; 1^T] nu = [0; 1] in the least-squares sense.
///
/// Throws SingularSystem when the residual exceeds `tol.residual` and
/// NonPositive when an entry of nu is not strictly positive (which happens
/// only if the network is not strongly connected).
EigenCentrality left_null_eigenvector(const Network& net,
                                      const SpectralTolerances& tol = {});

/// Zero-eigenvalue left eigenvector of diag(gamma) L, normalized to sum 1:
/// entries (nu_i / gamma_i) / sum_j (nu_j / gamma_j).
Eigen::VectorXd scaled_eigenvector(const Eigen::VectorXd& nu, const Eigen::VectorXd& gamma);

/// ||v^T diag(gamma) L||_inf; gamma may be empty, meaning all ones.
double left_residual(const Eigen::VectorXd& v, const Network& net,
                     const Eigen::VectorXd& gamma = {});

}  // namespace consensus
