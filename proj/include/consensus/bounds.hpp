#pragma once

#include <utility>

#include <Eigen/Dense>

#include "consensus/dynamics.hpp"
#include "consensus/linprog.hpp"
#include "consensus/netgraph.hpp"

namespace consensus {

enum class Direction { Minimize, Maximize };

/// Box on the inverse gains phi_i = 1/gamma_i.
struct PhiBox {
  Eigen::VectorXd phi_low;   ///< 1 / gamma_high
  Eigen::VectorXd phi_high;  ///< 1 / gamma_low

  static PhiBox from_spec(const GammaSpec& spec);
  std::size_t size() const { return static_cast<std::size_t>(phi_low.size()); }
  /// Throws RangeError unless 0 < phi_low_i <= phi_high_i for all i.
  void validate() const;
};

/// optimize (sum_i p_i phi_i) / (sum_i q_i phi_i) over phi in the box.
struct FractionalProgram {
  Eigen::VectorXd numerator;    ///< p_i = nu_i x_i(0)
  Eigen::VectorXd denominator;  ///< q_i = nu_i
  PhiBox box;
  Direction direction = Direction::Minimize;

  double evaluate(const Eigen::VectorXd& phi) const;
};

FractionalProgram build_lfp(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                            const PhiBox& box, Direction direction);

/// Floor that stands in for the strict inequality tau > 0.
inline constexpr double kTauFloor = 1e-12;

/// Charnes-Cooper reduction. Variables are (chi_1..chi_n, tau) with
/// objective sum_i p_i chi_i, rows chi - phi_high tau <= 0 and
/// -chi + phi_low tau <= 0, normalisation q^T chi = 1, tau >= kTauFloor.
LinearProgram charnes_cooper(const FractionalProgram& lfp);

/// Optimum of a fractional program recovered from its Charnes-Cooper LP.
struct FractionalOptimum {
  double value = 0.0;
  Eigen::VectorXd phi;  ///< chi / tau
  double tau = 0.0;
};

/// Throws DegenerateTau when tau sits at its floor and LpFailure when the
/// LP is not solved to optimality.
FractionalOptimum solve_fractional(const FractionalProgram& lfp);

struct BoundsResult {
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  Eigen::VectorXd gamma_star_low;   ///< minimiser gamma_*
  Eigen::VectorXd gamma_star_high;  ///< maximiser gamma^*
  Eigen::VectorXd nu_under;
  Eigen::VectorXd nu_over;
  double conservative_low = 0.0;
  double conservative_high = 0.0;

  double gap() const { return alpha_max - alpha_min; }
  double conservative_gap() const { return conservative_high - conservative_low; }
  ExtremalEigenvectors extremal() const { return {nu_under, nu_over}; }
};

/// Gamma components closer than this to an interval endpoint are snapped.
inline constexpr double kSnapTolerance = 1e-9;

/// Both consensus bounds for x0 under the gain box of `spec`.
BoundsResult solve_bounds(const Network& net, const Eigen::VectorXd& x0, const GammaSpec& spec);

/// Same, with the Laplacian's left null eigenvector already computed.
BoundsResult solve_bounds(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                          const PhiBox& box);

/// One bound only: alpha_min for Minimize, alpha_max for Maximize.
double solve_single_bound(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                          const PhiBox& box, Direction direction);

/// Brute-force extremes of the fractional objective over all 2^n box corners.
/// Throws TooLarge for n > 20.
std::pair<double, double> vertex_oracle(const Network& net, const Eigen::VectorXd& x0,
                                        const GammaSpec& spec);
std::pair<double, double> vertex_oracle(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                                        const PhiBox& box);

/// (min x0, max x0).
std::pair<double, double> conservative_bounds(const Eigen::VectorXd& x0);

}  // namespace consensus
