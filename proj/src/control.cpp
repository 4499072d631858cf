#include "consensus/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "consensus/errors.hpp"
#include "consensus/linprog.hpp"
#include "consensus/parallel.hpp"
#include "consensus/spectral.hpp"
#include "consensus/textio.hpp"

namespace consensus {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Corollary1: return "cor1";
    case Strategy::Baseline: return "baseline";
    case Strategy::BruteForce: return "brute";
    case Strategy::None: return "none";
  }
  return "none";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "cor1" || name == "corollary1") return Strategy::Corollary1;
  if (name == "baseline") return Strategy::Baseline;
  if (name == "brute" || name == "bruteforce") return Strategy::BruteForce;
  if (name == "none") return Strategy::None;
  throw ArgumentError("unknown strategy '" + std::string(name) + "'");
}

ControlProblem ControlProblem::make(Network net, Eigen::VectorXd x0, int d, double u_max,
                                    std::size_t n_b, GammaSpec spec) {
  ControlProblem p{std::move(net), std::move(x0), d, u_max,
                   static_cast<double>(n_b) * u_max, n_b, std::move(spec), {}};
  p.validate();
  p.nu = left_null_eigenvector(p.net).nu;
  return p;
}

ControlProblem ControlProblem::with_budget(Network net, Eigen::VectorXd x0, int d, double u_max,
                                           double budget, GammaSpec spec) {
  std::size_t n_b = 0;
  if (u_max > 0.0 && budget >= 0.0)
    n_b = static_cast<std::size_t>(std::floor(budget / u_max + 1e-9));
  ControlProblem p{std::move(net), std::move(x0), d, u_max, budget, n_b, std::move(spec), {}};
  p.validate();
  p.nu = left_null_eigenvector(p.net).nu;
  return p;
}

void ControlProblem::validate() const {
  if (d != 0 && d != 1) throw ArgumentError("control: d must be 0 or 1");
  if (!(u_max >= 0.0 && u_max <= 1.0)) throw RangeError("0 <= u_max <= 1 violated");
  if (!(budget >= 0.0)) throw RangeError("budget >= 0 violated");
  if (size() != net.size() || spec.size() != net.size())
    throw ArgumentError("control: dimension mismatch");
  if (n_b > size()) throw ArgumentError("control: n_b exceeds the number of agents");
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    if (!(x0(i) >= 0.0 && x0(i) <= 1.0)) throw RangeError("x0 in [0,1] violated");
}

Eigen::VectorXd apply_control(const Eigen::VectorXd& x0, const Eigen::VectorXd& u, int d) {
  if (x0.size() != u.size()) throw ArgumentError("apply_control: dimension mismatch");
  return (static_cast<double>(d) * u.array() + x0.array() * (1.0 - u.array())).matrix();
}

double controlled_bound(const ControlProblem& p, const Eigen::VectorXd& u) {
  return solve_single_bound(p.nu, apply_control(p.x0, u, p.d), PhiBox::from_spec(p.spec),
                            p.bound_direction());
}

AllocationPlan make_binary_plan(const ControlProblem& p, std::vector<std::size_t> funded,
                                Strategy strategy) {
  std::sort(funded.begin(), funded.end());
  AllocationPlan plan;
  plan.strategy = strategy;
  plan.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.size()));
  for (auto i : funded) plan.u(static_cast<Eigen::Index>(i)) = p.u_max;
  plan.budget_used = p.u_max * static_cast<double>(funded.size());
  plan.funded = std::move(funded);
  plan.predicted_bound = controlled_bound(p, plan.u);
  return plan;
}

Corollary1Solution solve_corollary1_lp(const Eigen::VectorXd& nu, const Eigen::VectorXd& x,
                                       const PhiBox& box, int d, double u_max, double budget,
                                       const std::vector<bool>& active, bool exact_ucap) {
  const Eigen::Index n = nu.size();
  if (x.size() != n || static_cast<Eigen::Index>(box.size()) != n ||
      static_cast<Eigen::Index>(active.size()) != n)
    throw ArgumentError("corollary1: dimension mismatch");

  std::vector<Eigen::Index> ctrl;
  for (Eigen::Index i = 0; i < n; ++i)
    if (active[static_cast<std::size_t>(i)]) ctrl.push_back(i);
  const auto m = static_cast<Eigen::Index>(ctrl.size());
  const Eigen::Index chi = n + m;

  // Columns: phi~ (n), u~ (m), chi.
  auto lp = LinearProgram::with_variables(static_cast<std::size_t>(n + m + 1),
                                          d == 1 ? Sense::Maximize : Sense::Minimize);
  lp.c.head(n) = nu.cwiseProduct(x);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = ctrl[static_cast<std::size_t>(k)];
    lp.c(n + k) = nu(i) * (static_cast<double>(d) - x(i));
  }
  lp.lower(chi) = kTauFloor;

  const Eigen::Index rows = 2 * n + m + 1;
  lp.a_ineq = Eigen::MatrixXd::Zero(rows, n + m + 1);
  lp.b_ineq = Eigen::VectorXd::Zero(rows);
  for (Eigen::Index i = 0; i < n; ++i) {
    lp.a_ineq(i, i) = 1.0;
    lp.a_ineq(i, chi) = -box.phi_high(i);
    lp.a_ineq(n + i, i) = -1.0;
    lp.a_ineq(n + i, chi) = box.phi_low(i);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = ctrl[static_cast<std::size_t>(k)];
    lp.a_ineq(2 * n + k, n + k) = 1.0;
    if (exact_ucap)
      lp.a_ineq(2 * n + k, i) = -u_max;
    else
      lp.a_ineq(2 * n + k, chi) = -u_max;
    lp.a_ineq(rows - 1, n + k) = 1.0 / box.phi_low(i);
  }
  lp.a_ineq(rows - 1, chi) = -budget;

  lp.a_eq = Eigen::MatrixXd::Zero(1, n + m + 1);
  lp.a_eq.row(0).head(n) = nu.transpose();
  lp.b_eq = Eigen::VectorXd::Ones(1);

  const auto sol = solve_lp(lp);
  if (!sol.optimal())
    throw LpFailure("control LP not optimal: " + std::string(to_string(sol.status)));

  Corollary1Solution out;
  out.objective = sol.objective;
  out.chi = sol.z(chi);
  if (out.chi <= 2.0 * kTauFloor) throw DegenerateTau("control LP scale at its floor");
  out.phi = sol.z.head(n) / out.chi;
  out.u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = ctrl[static_cast<std::size_t>(k)];
    out.u(i) = std::clamp(sol.z(n + k) / sol.z(i), 0.0, u_max);
  }
  return out;
}

namespace {

AllocationPlan zero_plan(const ControlProblem& p, Strategy strategy) {
  return make_binary_plan(p, {}, strategy);
}

std::size_t affordable(double budget, double u_max) {
  if (u_max <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(budget / u_max + 1e-9));
}

// Indices with active[i], ordered by score descending then index ascending.
std::vector<std::size_t> ranked(const Eigen::VectorXd& score, const std::vector<bool>& active) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i]) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return score(static_cast<Eigen::Index>(a)) > score(static_cast<Eigen::Index>(b));
  });
  return idx;
}

}  // namespace

AllocationPlan allocate_corollary1(const ControlProblem& p, const Corollary1Options& options) {
  p.validate();
  const auto n = p.size();
  if (p.budget <= 0.0 || p.u_max <= 0.0) return zero_plan(p, Strategy::Corollary1);

  const auto box = PhiBox::from_spec(p.spec);
  Eigen::VectorXd x = p.x0;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> funded;
  double remaining = p.budget;
  Eigen::VectorXd last_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::size_t solves = 0;
  const double threshold = p.u_max * (1.0 - options.freeze_rel_tol);

  while (affordable(remaining, p.u_max) > 0 && funded.size() < n) {
    const auto sol =
        solve_corollary1_lp(p.nu, x, box, p.d, p.u_max, remaining, active, options.exact_ucap);
    ++solves;
    last_u = sol.u;
    auto order = ranked(sol.u, active);
    std::vector<std::size_t> frozen;
    for (auto i : order) {
      if (sol.u(static_cast<Eigen::Index>(i)) < threshold) break;
      if (frozen.size() == affordable(remaining, p.u_max)) break;
      frozen.push_back(i);
    }
    if (frozen.empty()) break;
    for (auto i : frozen) {
      const auto k = static_cast<Eigen::Index>(i);
      active[i] = false;
      x(k) = static_cast<double>(p.d) * p.u_max + x(k) * (1.0 - p.u_max);
      funded.push_back(i);
    }
    remaining -= p.u_max * static_cast<double>(frozen.size());
  }

  const auto extra = affordable(remaining, p.u_max);
  const auto order = ranked(last_u, active);
  for (std::size_t k = 0; k < extra && k < order.size(); ++k) funded.push_back(order[k]);

  auto plan = make_binary_plan(p, std::move(funded), Strategy::Corollary1);
  plan.lp_solves = solves;
  return plan;
}

Eigen::VectorXd influence_powers(const Eigen::VectorXd& nu_gamma, const Eigen::VectorXd& x0,
                                 int d) {
  if (nu_gamma.size() != x0.size()) throw ArgumentError("influence_powers: dimension mismatch");
  return (nu_gamma.array() * (static_cast<double>(d) - x0.array()).abs()).matrix();
}

Eigen::VectorXd influence_powers(const ControlProblem& p) {
  const Eigen::VectorXd gamma0 = p.spec.clamp(gamma_stubbornness(p.x0, p.net));
  return influence_powers(scaled_eigenvector(p.nu, gamma0), p.x0, p.d);
}

AllocationPlan allocate_baseline(const ControlProblem& p) {
  p.validate();
  const auto rho = influence_powers(p);
  auto order = ranked(rho, std::vector<bool>(p.size(), true));
  order.resize(std::min(p.n_b, affordable(p.budget, p.u_max)));
  return make_binary_plan(p, std::move(order), Strategy::Baseline);
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

AllocationPlan allocate_bruteforce(const ControlProblem& p, unsigned threads) {
  p.validate();
  const auto n = p.size();
  const auto k = std::min(p.n_b, affordable(p.budget, p.u_max));
  const auto count = binomial(n, k);
  if (count > kBruteForceCap)
    throw TooLarge("brute force: C(" + std::to_string(n) + ", " + std::to_string(k) +
                   ") exceeds the enumeration cap");

  std::vector<std::vector<std::size_t>> subsets;
  subsets.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> s(k);
  std::iota(s.begin(), s.end(), 0);
  for (;;) {
    subsets.push_back(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }

  const auto box = PhiBox::from_spec(p.spec);
  std::vector<double> value(subsets.size());
  parallel_for(
      subsets.size(),
      [&](std::size_t t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (auto i : subsets[t]) u(static_cast<Eigen::Index>(i)) = p.u_max;
        value[t] = solve_single_bound(p.nu, apply_control(p.x0, u, p.d), box,
                                      p.bound_direction());
      },
      threads);

  std::size_t best = 0;
  for (std::size_t t = 1; t < value.size(); ++t) {
    const bool better = p.d == 1 ? value[t] > value[best] : value[t] < value[best];
    if (better) best = t;
  }
  auto plan = make_binary_plan(p, subsets[best], Strategy::BruteForce);
  plan.predicted_bound = value[best];
  return plan;
}

AllocationPlan allocate(const ControlProblem& p, Strategy s, const Corollary1Options& options) {
  switch (s) {
    case Strategy::Corollary1: return allocate_corollary1(p, options);
    case Strategy::Baseline: return allocate_baseline(p);
    case Strategy::BruteForce: return allocate_bruteforce(p);
    case Strategy::None: return zero_plan(p, Strategy::None);
  }
  return zero_plan(p, Strategy::None);
}

EvaluationRecord evaluate_allocation(const ControlProblem& p, const AllocationPlan& plan,
                                     std::size_t trials, std::uint64_t seed, unsigned threads) {
  const Eigen::VectorXd x = apply_control(p.x0, plan.u, p.d);
  const auto bounds = solve_bounds(p.nu, x, PhiBox::from_spec(p.spec));

  struct Trial {
    double alpha = 0.0;
    bool converged = false;
    bool satisfied = false;
  };
  std::vector<Trial> results(trials);
  parallel_for(
      trials,
      [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        SimulationOptions opts;
        opts.record_states = false;
        const auto rec = simulate(p.net, x, p.spec, bounds.extremal(), rng, opts);
        results[t] = {rec.alpha, rec.converged, rec.all_both()};
      },
      threads);

  EvaluationRecord r;
  r.predicted_bound = p.d == 1 ? bounds.alpha_min : bounds.alpha_max;
  r.alpha_min = bounds.alpha_min;
  r.alpha_max = bounds.alpha_max;
  r.trials = trials;
  std::size_t inside = 0, satisfied = 0, satisfied_inside = 0;
  double sum = 0.0;
  for (const auto& t : results) {
    if (!t.converged) continue;
    ++r.converged;
    r.alphas.push_back(t.alpha);
    sum += t.alpha;
    const bool in = t.alpha >= bounds.alpha_min - 1e-9 && t.alpha <= bounds.alpha_max + 1e-9;
    inside += in;
    if (t.satisfied) {
      ++satisfied;
      satisfied_inside += in;
    }
  }
  if (r.converged > 0) {
    const auto c = static_cast<double>(r.converged);
    r.alpha_mean = sum / c;
    r.containment_rate = static_cast<double>(inside) / c;
    r.assumption_rate = static_cast<double>(satisfied) / c;
  }
  if (satisfied > 0)
    r.satisfied_containment = static_cast<double>(satisfied_inside) / static_cast<double>(satisfied);
  return r;
}

std::string format_plan(const AllocationPlan& plan) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < plan.u.size(); ++i)
    if (plan.u(i) > 0.0) out << i << ' ' << format_double(plan.u(i)) << '\n';
  return out.str();
}

Eigen::VectorXd parse_plan(const std::string& text, std::size_t n) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string_view> parts;
    for (auto f : split(t, ' '))
      if (!f.empty()) parts.push_back(f);
    if (parts.size() == 1 && parts[0].find(',') != std::string_view::npos) parts = split(t, ',');
    std::size_t agent = 0;
    double value = 0.0;
    if (parts.size() != 2 || !parse_size(trim(parts[0]), agent) ||
        !parse_double(trim(parts[1]), value))
      throw ParseError("expected 'agent u'", lineno);
    if (agent >= n) throw ParseError("agent index out of range", lineno);
    if (!(value >= 0.0 && value <= 1.0)) throw ParseError("u outside [0,1]", lineno);
    u(static_cast<Eigen::Index>(agent)) = value;
  }
  return u;
}

}  // namespace consensus
