#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "consensus/bounds.hpp"
#include "consensus/dynamics.hpp"
#include "consensus/netgraph.hpp"
#include "consensus/rng.hpp"

namespace consensus {

enum class Strategy { Corollary1, Baseline, BruteForce, None };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct ControlProblem {
  Network net;
  Eigen::VectorXd x0;
  int d = 1;
  double u_max = 0.0;
  double budget = 0.0;
  std::size_t n_b = 0;
  GammaSpec spec;
  Eigen::VectorXd nu;  // left null eigenvector of L; filled by make()

  /// Cardinality form used in the experiments: budget = n_b * u_max.
  static ControlProblem make(Network net, Eigen::VectorXd x0, int d, double u_max,
                             std::size_t n_b, GammaSpec spec);
  /// Explicit budget; n_b is set to floor(budget / u_max).
  static ControlProblem with_budget(Network net, Eigen::VectorXd x0, int d, double u_max,
                                    double budget, GammaSpec spec);

  std::size_t size() const { return static_cast<std::size_t>(x0.size()); }
  Direction bound_direction() const { return d == 1 ? Direction::Minimize : Direction::Maximize; }
  void validate() const;
};

struct AllocationPlan {
  Eigen::VectorXd u;
  std::vector<std::size_t> funded;
  double budget_used = 0.0;
  double predicted_bound = 0.0;
  Strategy strategy = Strategy::None;
  std::size_t lp_solves = 0;
};

/// d * u_i + x_i (1 - u_i) componentwise.
Eigen::VectorXd apply_control(const Eigen::VectorXd& x0, const Eigen::VectorXd& u, int d);

/// alpha_min of the controlled state when d = 1, alpha_max when d = 0.
double controlled_bound(const ControlProblem& p, const Eigen::VectorXd& u);

/// Plan with the given funded agents at u_max and its predicted bound.
AllocationPlan make_binary_plan(const ControlProblem& p, std::vector<std::size_t> funded,
                                Strategy strategy);

struct Corollary1Options {
  /// u~_i <= u_max phi~_i. When false the cap row is u~_i <= u_max chi,
  /// which bounds the recovered u_i by u_max / phi_i.
  bool exact_ucap = true;
  double freeze_rel_tol = 1e-6;
};

/// One solve of the relaxed control LP.
struct Corollary1Solution {
  Eigen::VectorXd u;    // u~ / phi~ (zero for inactive agents)
  Eigen::VectorXd phi;  // phi~ / chi
  double chi = 0.0;
  double objective = 0.0;
};

/// Solves the relaxed LP with controls allowed only where active[i] is true.
Corollary1Solution solve_corollary1_lp(const Eigen::VectorXd& nu, const Eigen::VectorXd& x,
                                       const PhiBox& box, int d, double u_max, double budget,
                                       const std::vector<bool>& active, bool exact_ucap);

AllocationPlan allocate_corollary1(const ControlProblem& p, const Corollary1Options& options = {});

/// rho_i = nu_gamma_i * |d - x_i|.
Eigen::VectorXd influence_powers(const Eigen::VectorXd& nu_gamma, const Eigen::VectorXd& x0,
                                 int d);
/// Influence powers with gamma the clamped stubbornness of p.x0.
Eigen::VectorXd influence_powers(const ControlProblem& p);

AllocationPlan allocate_baseline(const ControlProblem& p);

inline constexpr std::uint64_t kBruteForceCap = 1'000'000;

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

/// Exhaustive search over n_b-subsets. Throws TooLarge above kBruteForceCap.
AllocationPlan allocate_bruteforce(const ControlProblem& p, unsigned threads = 0);

AllocationPlan allocate(const ControlProblem& p, Strategy s, const Corollary1Options& options = {});

struct EvaluationRecord {
  double predicted_bound = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double alpha_mean = 0.0;
  double containment_rate = 0.0;       // over all converged trials
  double assumption_rate = 0.0;        // fraction of trials with both flags at every step
  double satisfied_containment = 1.0;  // containment among assumption-satisfying trials
  std::size_t trials = 0;
  std::size_t converged = 0;
  std::vector<double> alphas;
};

/// Simulates `trials` gain realizations from the controlled state. Trial t
/// uses the stream derive_seed(seed, t).
EvaluationRecord evaluate_allocation(const ControlProblem& p, const AllocationPlan& plan,
                                     std::size_t trials, std::uint64_t seed,
                                     unsigned threads = 0);

/// Plan text: one "agent u_i" line per agent with u_i > 0.
std::string format_plan(const AllocationPlan& plan);
/// Inverse of format_plan for an n-agent network.
Eigen::VectorXd parse_plan(const std::string& text, std::size_t n);

}  // namespace consensus
