#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "consensus/netgraph.hpp"
#include "consensus/rng.hpp"

namespace consensus {

enum class GammaModel { Stubbornness, UniformRandom, Constant };

GammaModel parse_gamma_model(std::string_view name);
std::string_view to_string(GammaModel model);

/// Uncertainty interval of the interaction gains together with the model
/// that generates gamma(k). Per-agent bounds are omega / n_i.
struct GammaSpec {
  double omega_low = 0.0;
  double omega_high = 0.0;
  Eigen::VectorXd gamma_low;
  Eigen::VectorXd gamma_high;
  GammaModel model = GammaModel::Stubbornness;
  Eigen::VectorXd constant;  ///< used by GammaModel::Constant only

  /// Throws RangeError unless 0 < omega_low <= omega_high <= 1, and for the
  /// constant model, unless the vector lies inside the per-agent bounds.
  static GammaSpec make(const Network& net, double omega_low, double omega_high,
                        GammaModel model, Eigen::VectorXd constant = {});

  std::size_t size() const { return static_cast<std::size_t>(gamma_low.size()); }
  Eigen::VectorXd clamp(const Eigen::VectorXd& gamma) const;
};

/// COCA stubbornness: gamma_i = x_i (1 - x_i) / n_i. Not clamped.
Eigen::VectorXd gamma_stubbornness(const Eigen::VectorXd& x, const Network& net);

/// Independent uniform draw of every gamma_i on [gamma_low_i, gamma_high_i].
Eigen::VectorXd gamma_uniform_random(const GammaSpec& spec, Rng& rng);

/// One realization of gamma(k) under the spec's model, clamped to bounds.
Eigen::VectorXd realize_gamma(const GammaSpec& spec, const Network& net,
                              const Eigen::VectorXd& x, Rng& rng);

/// x_i + gamma_i * sum_j a_ij (x_j - x_i), i.e. (I - diag(gamma) L) x.
Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                     const Network& net);

/// diag(gamma) L x, the per-agent decrement applied by step().
Eigen::VectorXd weighted_disagreement(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                                      const Network& net);

struct AssumptionFlags {
  bool under = true;  ///< nu_under^T diag(gamma) L x <= slack
  bool over = true;   ///< nu_over^T diag(gamma) L x >= -slack
  bool both() const { return under && over; }
};

inline constexpr double kAssumptionSlack = 1e-12;

AssumptionFlags check_assumption2(const Eigen::VectorXd& nu_under,
                                  const Eigen::VectorXd& nu_over,
                                  const Eigen::VectorXd& gamma, const Network& net,
                                  const Eigen::VectorXd& x,
                                  double slack = kAssumptionSlack);

struct ExtremalEigenvectors {
  Eigen::VectorXd nu_under;
  Eigen::VectorXd nu_over;
};

struct SimulationOptions {
  double tol = 1e-9;
  std::size_t max_steps = 1'000'000;
  double slack = kAssumptionSlack;
  bool record_states = true;
};

struct TrajectoryRecord {
  std::vector<Eigen::VectorXd> states;  ///< x(0..steps); empty unless recorded
  Eigen::VectorXd final_state;
  std::vector<double> theta_under;      ///< nu_under^T x(k), one per state
  std::vector<double> theta_over;
  std::vector<AssumptionFlags> flags;   ///< one per transition k -> k+1
  double alpha = 0.0;
  std::size_t steps = 0;
  bool converged = false;

  bool all_under() const;
  bool all_over() const;
  bool all_both() const { return all_under() && all_over(); }
  double under_rate() const;
  double over_rate() const;
  /// theta_under nondecreasing and theta_over nonincreasing within slack.
  bool theta_monotone(double slack = 1e-10) const;
};

/// Iterates step() with gamma(k) drawn from the spec's model until
/// max(x) - min(x) <= tol or max_steps transitions. When extremal
/// eigenvectors are given, records the theta traces and the per-step
/// Assumption-2 flags. A run that hits max_steps is returned with
/// converged = false.
TrajectoryRecord simulate(const Network& net, const Eigen::VectorXd& x0,
                          const GammaSpec& spec,
                          const std::optional<ExtremalEigenvectors>& extremal, Rng& rng,
                          const SimulationOptions& options = {});

double spread(const Eigen::VectorXd& x);

}  // namespace consensus
