#include "consensus/spectral.hpp"

#include <cmath>
#include <string>

#include "consensus/errors.hpp"

namespace consensus {

EigenCentrality left_null_eigenvector(const Network& net, const SpectralTolerances& tol) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (n == 0) throw ArgumentError("left_null_eigenvector: empty network");

  Eigen::MatrixXd system(n + 1, n);
  system.topRows(n) = net.laplacian().transpose();
  system.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;

  EigenCentrality out;
  out.nu = system.colPivHouseholderQr().solve(rhs);
  out.nu /= out.nu.sum();
  out.residual = left_residual(out.nu, net);

  if (!(out.residual <= tol.residual) || !std::isfinite(out.residual))
    throw SingularSystem("left null eigenvector residual " + std::to_string(out.residual) +
                         " exceeds tolerance");
  if (std::abs(out.nu.sum() - 1.0) > tol.normalization)
    throw SingularSystem("left null eigenvector failed normalization");
  // Entries at roundoff level count as zero.
  const double floor = 1e-13 * out.nu.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(out.nu(i) > floor))
      throw NonPositive("left null eigenvector entry " + std::to_string(i) +
                        " is not positive; network is not strongly connected");
  return out;
}

Eigen::VectorXd scaled_eigenvector(const Eigen::VectorXd& nu, const Eigen::VectorXd& gamma) {
  if (nu.size() != gamma.size())
    throw ArgumentError("scaled_eigenvector: dimension mismatch");
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (!(gamma(i) > 0.0))
      throw ArgumentError("scaled_eigenvector: gamma_" + std::to_string(i) +
                          " must be positive");
  Eigen::VectorXd scaled = nu.cwiseQuotient(gamma);
  return scaled / scaled.sum();
}

double left_residual(const Eigen::VectorXd& v, const Network& net,
                     const Eigen::VectorXd& gamma) {
  Eigen::RowVectorXd weighted = v.transpose();
  if (gamma.size() != 0) weighted = weighted.cwiseProduct(gamma.transpose());
  return (weighted * net.laplacian()).cwiseAbs().maxCoeff();
}

}  // namespace consensus
