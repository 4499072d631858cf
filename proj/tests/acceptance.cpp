// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "consensus/bounds.hpp"
#include "consensus/control.hpp"
#include "consensus/harness.hpp"
#include "consensus/linprog.hpp"
#include "consensus/spectral.hpp"
#include "oracles.hpp"

using namespace consensus;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("CRITERION %2d: %s  (%.1fs)  %s\n", id, pass ? "PASS" : "FAIL", seconds,
              detail.c_str());
  std::fflush(stdout);
}

template <class F>
void run(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
    pass = false;
  }
  report(id, pass,
         detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// Brute-force alpha bounds over every gain vertex, using the eigendecomposition
// left null vector and the closed-form weighted average.
std::pair<double, double> enumerate_vertices(const Network& net, const Eigen::VectorXd& x0,
                                             const GammaSpec& spec) {
  const Eigen::VectorXd nu = oracle::eigensolve_left_null(net);
  const auto n = static_cast<int>(x0.size());
  double lo = INFINITY, hi = -INFINITY;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = (mask >> i) & 1U ? spec.gamma_high(i) : spec.gamma_low(i);
      num += nu(i) / g * x0(i);
      den += nu(i) / g;
    }
    lo = std::min(lo, num / den);
    hi = std::max(hi, num / den);
  }
  return {lo, hi};
}

double endpoint_distance(const Eigen::VectorXd& gamma, const GammaSpec& spec) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    worst = std::max(worst, std::min(std::abs(gamma(i) - spec.gamma_low(i)),
                                     std::abs(gamma(i) - spec.gamma_high(i))));
  return worst;
}

Eigen::VectorXd random_gamma(const GammaSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd g(spec.gamma_low.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    g(i) = spec.gamma_low(i) + u(rng) * (spec.gamma_high(i) - spec.gamma_low(i));
  return g;
}

}  // namespace

int main() {
  std::cout << "acceptance run\n";

  CampaignStats sc[3];
  for (int k = 0; k < 3; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    sc[k] = run_bounds_scenario(ScenarioConfig::preset(k + 1));
    const auto& s = sc[k].summary;
    std::printf(
        "scenario%d: trials %zu failed %zu unconverged %zu gap %.4f conservative %.4f "
        "under %.1f%% over %.1f%% both %.1f%% containment %.2f%% (%.1fs)\n",
        k + 1, s.trials, s.failed, s.unconverged, s.mean_gap, s.mean_conservative_gap,
        s.under_pct, s.over_pct, s.both_pct, s.containment_pct,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::fflush(stdout);
  const auto& s1 = sc[0].summary;

  run(1, [&](std::string& d) {
    std::size_t satisfied = 0, sat_in = 0;
    for (const auto& r : sc[0].rows)
      if (r.ok() && r.converged && r.both()) {
        ++satisfied;
        sat_in += r.contained;
      }
    d = "satisfied runs " + std::to_string(sat_in) + "/" + std::to_string(satisfied) +
        " contained; all runs " + fmt("%.2f%% contained (need >= 99%%)", s1.containment_pct) +
        "; failed " + std::to_string(s1.failed) + ", unconverged " + std::to_string(s1.unconverged);
    return s1.failed == 0 && s1.unconverged == 0 && sat_in == satisfied &&
           s1.containment_pct >= 99.0;
  });

  run(2, [&](std::string& d) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(3, 12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_value = 0.0, worst_endpoint = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = size(rng);
      const auto net = t % 2 == 0 ? generate_directed_ba(n, 2, 0.2, rng()).network
                                  : oracle::random_strong_network(n, 0.3, rng());
      Eigen::VectorXd x0(static_cast<Eigen::Index>(net.size()));
      for (auto& v : x0) v = 0.1 + 0.8 * u(rng);
      const double wl = 0.02 + 0.2 * u(rng);
      const double wh = wl + (1.0 - wl) * u(rng);
      const auto spec = GammaSpec::make(net, wl, wh, GammaModel::Stubbornness);
      const auto r = solve_bounds(net, x0, spec);
      const auto [lo, hi] = enumerate_vertices(net, x0, spec);
      worst_value = std::max({worst_value, std::abs(r.alpha_min - lo), std::abs(r.alpha_max - hi)});
      worst_endpoint = std::max({worst_endpoint, endpoint_distance(r.gamma_star_low, spec),
                                 endpoint_distance(r.gamma_star_high, spec)});
    }
    d = fmt("max |bound - vertex enumeration| %.3g (<= 1e-8)", worst_value) +
        fmt("; max endpoint distance %.3g (<= 1e-9)", worst_endpoint);
    return worst_value <= 1e-8 && worst_endpoint <= 1e-9;
  });

  run(3, [&](std::string& d) {
    const auto& s2 = sc[1].summary;
    const auto& s3 = sc[2].summary;
    d = fmt("gap s1 %.4f", s1.mean_gap) + fmt(", s2 %.4f (0.19 +- 0.05)", s2.mean_gap) +
        fmt(", s3 %.4f (0.10 +- 0.05)", s3.mean_gap) +
        fmt("; conservative s1 %.4f", s1.mean_conservative_gap) +
        fmt(", s2 %.4f (0.8 +- 0.02)", s2.mean_conservative_gap) +
        fmt(", s3 %.4f (reported only)", s3.mean_conservative_gap);
    return within(s1.mean_gap, 0.19, 0.05) && within(s2.mean_gap, 0.19, 0.05) &&
           within(s3.mean_gap, 0.10, 0.05) && within(s1.mean_conservative_gap, 0.8, 0.02) &&
           within(s2.mean_conservative_gap, 0.8, 0.02);
  });

  run(4, [&](std::string& d) {
    const double r1 = s1.both_pct, r2 = sc[1].summary.both_pct, r3 = sc[2].summary.both_pct;
    d = fmt("both-conditions rate s1 %.1f%% (96.8 +- 5)", r1) +
        fmt(", s2 %.1f%% (76.7 +- 5)", r2) + fmt(", s3 %.1f%% (98.2 +- 3)", r3);
    return within(r1, 96.8, 5.0) && within(r2, 76.7, 5.0) && within(r3, 98.2, 3.0);
  });

  run(5, [&](std::string& d) {
    std::size_t satisfied = 0, mono = 0;
    for (const auto& r : sc[0].rows)
      if (r.ok() && r.converged && r.both()) {
        ++satisfied;
        mono += r.monotone;
      }
    d = std::to_string(mono) + "/" + std::to_string(satisfied) +
        " assumption-satisfying runs have monotone theta traces";
    return satisfied > 0 && mono == satisfied;
  });

  run(6, [&](std::string& d) {
    const auto stats = run_control_experiment(ControlConfig::small_preset());
    const auto& s = stats.summary;
    d = fmt("mean bound none %.4f", s.mean_none) + fmt(", cor1 %.4f", s.mean_cor1) +
        fmt(", baseline %.4f", s.mean_base) + fmt(", brute %.4f", s.mean_brute) +
        fmt("; cor1/brute %.4f (>= 0.95)", s.ratio_cor1) +
        fmt(", baseline/brute %.4f ([0.85, 1])", s.ratio_base) +
        "; dominance violations " + std::to_string(s.brute_dominance_violations) +
        ", failed " + std::to_string(s.failed);
    return s.failed == 0 && s.ratio_cor1 >= 0.95 && s.ratio_base >= 0.85 &&
           s.ratio_base <= 1.0 && s.brute_dominance_violations == 0;
  });

  run(7, [&](std::string& d) {
    const auto stats = run_control_experiment(ControlConfig::large_preset());
    const auto& s = stats.summary;
    std::size_t better = 0;
    for (const auto& r : stats.rows)
      if (r.ok() && r.bound_cor1 >= r.bound_base - 1e-9) ++better;
    d = std::to_string(better) + "/" + std::to_string(stats.rows.size()) +
        " cells with cor1 bound >= baseline bound" + fmt("; mean bound diff %.4g", s.mean_bound_diff) +
        fmt("; realised alpha: cor1 >= baseline in %.1f%% of cells", s.cor1_alpha_better_pct) +
        fmt(", mean diff %.4g", s.mean_alpha_diff) + "; failed " + std::to_string(s.failed);
    return s.failed == 0 && better == stats.rows.size();
  });

  run(8, [&](std::string& d) {
    std::mt19937_64 rng(88);
    std::uniform_int_distribution<std::size_t> size(3, 60);
    double worst_nu = 0.0, worst_gamma = 0.0, worst_scale = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = size(rng);
      const auto net = t % 2 == 0 ? generate_directed_ba(n, 1 + (t / 2) % 2, 0.2, rng()).network
                                  : oracle::random_strong_network(n, 0.15, rng());
      const auto spec = GammaSpec::make(net, 0.03, 0.25, GammaModel::UniformRandom);
      const Eigen::VectorXd gamma = random_gamma(spec, rng);
      const Eigen::VectorXd nu = left_null_eigenvector(net).nu;
      const Eigen::MatrixXd& L = net.laplacian();
      worst_nu = std::max(worst_nu, (nu.transpose() * L).cwiseAbs().maxCoeff());
      const Eigen::VectorXd ng = scaled_eigenvector(nu, gamma);
      worst_gamma = std::max(worst_gamma,
                             (ng.cwiseProduct(gamma).transpose() * L).cwiseAbs().maxCoeff());
      for (double c : {0.1, 1.0, 10.0})
        worst_scale = std::max(worst_scale,
                               (scaled_eigenvector(nu, c * gamma) - ng).cwiseAbs().maxCoeff());
    }
    d = fmt("max |nu^T L| %.3g", worst_nu) + fmt(", max |nu_g^T diag(g) L| %.3g (<= 1e-10)", worst_gamma) +
        fmt("; max scale drift %.3g (<= 1e-12)", worst_scale);
    return worst_nu <= 1e-10 && worst_gamma <= 1e-10 && worst_scale <= 1e-12;
  });

  run(9, [&](std::string& d) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_obj = 0.0, worst_feas = 0.0;
    int solved = 0;
    for (int t = 0; t < 500; ++t) {
      const int n = 1 + t % 8;
      auto lp = LinearProgram::with_variables(static_cast<std::size_t>(n),
                                              t % 2 ? Sense::Maximize : Sense::Minimize);
      Eigen::VectorXd a(n);
      for (int i = 0; i < n; ++i) {
        lp.c(i) = 2.0 * u(rng) - 1.0;
        lp.lower(i) = -1.0 + u(rng);
        lp.upper(i) = lp.lower(i) + 0.1 + 2.0 * u(rng);
        a(i) = 2.0 * u(rng) - 1.0;
      }
      // rhs between the smallest and largest row value on the box: always feasible
      double lo = 0.0, hi = 0.0;
      for (int i = 0; i < n; ++i) {
        lo += std::min(a(i) * lp.lower(i), a(i) * lp.upper(i));
        hi += std::max(a(i) * lp.lower(i), a(i) * lp.upper(i));
      }
      const double b = lo + u(rng) * (hi - lo);
      lp.add_inequality(a.transpose(), b);
      const auto expected = oracle::box_row_lp(lp.c, lp.sense == Sense::Maximize, lp.lower,
                                               lp.upper, a, b);
      const auto sol = solve_lp(lp);
      if (!expected || !sol.optimal()) {
        worst_obj = INFINITY;
        continue;
      }
      ++solved;
      worst_obj = std::max(worst_obj, std::abs(sol.objective - *expected));
      worst_feas = std::max(worst_feas, max_violation(lp, sol.z));
    }
    d = std::to_string(solved) + "/500 optimal" + fmt("; max objective error %.3g (<= 1e-9)", worst_obj) +
        fmt("; max violation %.3g (<= 1e-8)", worst_feas);
    return solved == 500 && worst_obj <= 1e-9 && worst_feas <= 1e-8;
  });

  run(10, [&](std::string& d) {
    bool same = true;
    for (int k = 0; k < 3; ++k) {
      auto cfg = ScenarioConfig::preset(k + 1);
      cfg.threads = 1;
      same = same && trials_csv(run_bounds_scenario(cfg).rows) == trials_csv(sc[k].rows);
    }
    auto small = ControlConfig::small_preset();
    small.draws = 100;
    small.threads = 1;
    const auto a = control_trials_csv(small, run_control_experiment(small).rows);
    small.threads = 0;
    const bool control_same = a == control_trials_csv(small, run_control_experiment(small).rows);
    d = std::string("scenario 1-3 trials.csv rerun (single thread) ") +
        (same ? "identical" : "DIFFERS") + "; control-small rerun " +
        (control_same ? "identical" : "DIFFERS");
    return same && control_same;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
