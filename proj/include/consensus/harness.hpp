#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consensus/control.hpp"
#include "consensus/dynamics.hpp"
#include "consensus/rng.hpp"

namespace consensus {

enum class X0Sampler { Uniform, Beta };

std::string_view to_string(X0Sampler s);
X0Sampler parse_sampler(std::string_view name);

/// Parameters of one bound-validation campaign. Serialised as flat
/// `key = value` text with the same field names.
struct ScenarioConfig {
  std::string id = "custom";
  std::size_t n_min = 10;
  std::size_t n_max = 100;
  std::size_t m = 2;
  double removal_fraction = 0.2;
  X0Sampler sampler = X0Sampler::Uniform;
  double lo = 0.1;
  double hi = 0.9;
  double beta_a = 2.0;
  double beta_b = 5.0;
  GammaModel gamma_model = GammaModel::Stubbornness;
  double omega_low = 0.09;
  double omega_high = 0.25;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t max_steps = 1'000'000;
  double tol = 1e-9;
  unsigned threads = 0;  // 0 = hardware concurrency; never affects results

  /// Scenarios 1, 2 and 3 of the bound-validation study.
  static ScenarioConfig preset(int scenario);
  /// Keys absent from the text keep their value from `base`.
  static ScenarioConfig parse(const std::string& text, ScenarioConfig base);
  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path, ScenarioConfig base);
  static ScenarioConfig load(const std::filesystem::path& path);
  std::string to_text() const;
  /// Throws RangeError / ArgumentError on inconsistent fields.
  void validate() const;
};

Eigen::VectorXd sample_x0_uniform(std::size_t n, double lo, double hi, Rng& rng);
/// Beta(a, b) on [0, 1], mapped affinely onto [lo, hi].
Eigen::VectorXd sample_x0_beta(std::size_t n, double a, double b, double lo, double hi, Rng& rng);
Eigen::VectorXd sample_x0(const ScenarioConfig& cfg, std::size_t n, Rng& rng);

struct TrialRow {
  std::size_t index = 0;
  std::size_t n = 0;
  std::size_t arcs = 0;
  double removed_fraction = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double alpha = 0.0;
  double conservative_low = 0.0;
  double conservative_high = 0.0;
  double under_rate = 0.0;  // fraction of steps with the lower condition
  double over_rate = 0.0;
  bool all_under = false;
  bool all_over = false;
  bool contained = false;
  bool monotone = false;
  bool converged = false;
  std::size_t steps = 0;
  std::string error;  // non-empty when the trial failed

  bool ok() const { return error.empty(); }
  bool both() const { return all_under && all_over; }
  double gap() const { return alpha_max - alpha_min; }
  double conservative_gap() const { return conservative_high - conservative_low; }
};

struct CampaignSummary {
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::size_t unconverged = 0;
  double mean_gap = 0.0;
  double mean_conservative_gap = 0.0;
  double under_pct = 0.0;
  double over_pct = 0.0;
  double both_pct = 0.0;
  double containment_pct = 0.0;
  double satisfied_containment_pct = 0.0;
  double satisfied_monotone_pct = 0.0;
};

struct CampaignStats {
  ScenarioConfig config;
  std::vector<TrialRow> rows;
  CampaignSummary summary;
};

/// Containment slack applied to alpha against [alpha_min, alpha_max].
inline constexpr double kContainmentSlack = 1e-9;

/// Trial `index` of a campaign; uses only the stream derive_seed(cfg.seed, index).
/// Failures are captured in TrialRow::error.
TrialRow run_bounds_trial(const ScenarioConfig& cfg, std::size_t index);
CampaignStats run_bounds_scenario(const ScenarioConfig& cfg);

/// Aggregates over the successful, converged rows.
CampaignSummary summarize(const std::vector<TrialRow>& rows);

std::string trials_csv(const std::vector<TrialRow>& rows);
std::string summary_csv(const CampaignSummary& s);
std::vector<TrialRow> parse_trials_csv(const std::string& text);
CampaignSummary parse_summary_csv(const std::string& text);

/// Writes trials.csv, summary.csv and config.txt into dir.
void write_campaign(const CampaignStats& stats, const std::filesystem::path& dir);
/// Reads a campaign back and recomputes the summary from the rows. Throws
/// InvariantError if it disagrees with summary.csv.
CampaignStats load_campaign(const std::filesystem::path& dir);

enum class ControlMode { Small, Large };

struct ControlConfig {
  ControlMode mode = ControlMode::Small;
  std::size_t n = 12;
  std::size_t m = 2;
  double removal_fraction = 0.2;
  std::uint64_t graph_seed = 1;
  double u_max = 0.2;
  std::size_t n_b = 3;
  double omega_low = 0.03;
  double omega_high = 0.25;
  GammaModel gamma_model = GammaModel::UniformRandom;
  double lo = 0.1;
  double hi = 0.9;
  std::size_t draws = 1000;             // small mode: number of x0 samples
  std::vector<double> beta_grid;        // large mode
  std::size_t sim_trials = 1;           // realised-alpha simulations per plan (large mode)
  bool exact_ucap = true;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  static ControlConfig small_preset();
  static ControlConfig large_preset();
  void validate() const;
  std::string to_text() const;
};

struct ControlRow {
  std::size_t index = 0;
  double beta_a = 0.0;  // large mode only
  double beta_b = 0.0;
  double bound_none = 0.0;
  double bound_cor1 = 0.0;
  double bound_base = 0.0;
  double bound_brute = 0.0;  // NaN in large mode
  double alpha_cor1 = 0.0;   // realised mean, large mode only
  double alpha_base = 0.0;
  std::string funded_cor1;
  std::string funded_base;
  std::string funded_brute;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct ControlSummary {
  std::size_t rows = 0;
  std::size_t failed = 0;
  double mean_none = 0.0;
  double mean_cor1 = 0.0;
  double mean_base = 0.0;
  double mean_brute = 0.0;
  double ratio_cor1 = 0.0;  // mean_cor1 / mean_brute
  double ratio_base = 0.0;
  std::size_t brute_dominance_violations = 0;
  double cor1_bound_better_pct = 0.0;  // rows with bound_cor1 >= bound_base - 1e-9
  double cor1_alpha_better_pct = 0.0;  // rows with alpha_cor1 >= alpha_base
  double mean_bound_diff = 0.0;        // mean(bound_cor1 - bound_base)
  double mean_alpha_diff = 0.0;
};

struct ControlStats {
  ControlConfig config;
  std::vector<ControlRow> rows;
  ControlSummary summary;
};

/// Network used by a control experiment, together with its gain spec.
std::pair<Network, GammaSpec> control_network(const ControlConfig& cfg);

ControlStats run_control_experiment(const ControlConfig& cfg);
ControlSummary summarize(const ControlConfig& cfg, const std::vector<ControlRow>& rows);
std::string control_trials_csv(const ControlConfig& cfg, const std::vector<ControlRow>& rows);
std::string control_summary_csv(const ControlSummary& s);
void write_control(const ControlStats& stats, const std::filesystem::path& dir);

}  // namespace consensus
