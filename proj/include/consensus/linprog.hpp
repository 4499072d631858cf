#pragma once

#include <cstddef>
#include <limits>
#include <string_view>

#include <Eigen/Dense>

namespace consensus {

enum class Sense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// optimize c^T z subject to
///   a_ineq z <= b_ineq,  a_eq z = b_eq,  lower <= z <= upper.
/// Bounds may be infinite on either side.
struct LinearProgram {
  Eigen::VectorXd c;
  Sense sense = Sense::Minimize;
  Eigen::MatrixXd a_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// n variables with zero cost, bounds [0, inf), no rows.
  static LinearProgram with_variables(std::size_t n, Sense sense = Sense::Minimize);

  std::size_t num_vars() const { return static_cast<std::size_t>(c.size()); }

  /// Appends a row. Coefficients must have num_vars() entries.
  void add_inequality(const Eigen::RowVectorXd& row, double rhs);
  void add_equality(const Eigen::RowVectorXd& row, double rhs);

  /// Throws ArgumentError on dimension mismatch or lower > upper.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd z;
  double objective = 0.0;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-11;
  /// 0 selects 20 * (rows + columns).
  std::size_t max_iterations = 0;
  /// Consecutive degenerate pivots after which pricing falls back to
  /// Bland's rule until the objective moves again.
  std::size_t degenerate_limit = 30;
};

/// Two-phase primal simplex on a dense tableau with implicit variable bounds.
/// Pricing is Dantzig's rule with ties (and degenerate stalls) resolved by
/// Bland's lowest-index rule, so the result is deterministic.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest violation of any row or bound at z.
double max_violation(const LinearProgram& lp, const Eigen::VectorXd& z);

}  // namespace consensus
