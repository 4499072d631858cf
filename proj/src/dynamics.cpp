#include "consensus/dynamics.hpp"

#include <algorithm>
#include <string>

#include "consensus/errors.hpp"
#include "consensus/textio.hpp"

namespace consensus {

GammaModel parse_gamma_model(std::string_view name) {
  if (name == "stubborn" || name == "stubbornness") return GammaModel::Stubbornness;
  if (name == "uniform") return GammaModel::UniformRandom;
  if (name == "constant") return GammaModel::Constant;
  throw ArgumentError("unknown gamma model '" + std::string(name) + "'");
}

std::string_view to_string(GammaModel model) {
  switch (model) {
    case GammaModel::Stubbornness: return "stubborn";
    case GammaModel::UniformRandom: return "uniform";
    case GammaModel::Constant: return "constant";
  }
  return "?";
}

GammaSpec GammaSpec::make(const Network& net, double omega_low, double omega_high,
                          GammaModel model, Eigen::VectorXd constant) {
  if (!(omega_low > 0.0 && omega_low <= omega_high && omega_high <= 1.0))
    throw RangeError("0 < omega_low <= omega_high <= 1 violated (omega_low=" +
                     format_double(omega_low) + ", omega_high=" + format_double(omega_high) +
                     ")");
  const auto n = static_cast<Eigen::Index>(net.size());
  GammaSpec spec;
  spec.omega_low = omega_low;
  spec.omega_high = omega_high;
  spec.model = model;
  spec.gamma_low.resize(n);
  spec.gamma_high.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ni = net.neighbor_counts()[static_cast<std::size_t>(i)];
    if (ni < 1)
      throw InvariantError("n_i >= 1 violated: agent " + std::to_string(i) +
                           " has no neighbours");
    spec.gamma_low(i) = omega_low / ni;
    spec.gamma_high(i) = omega_high / ni;
  }
  if (model == GammaModel::Constant) {
    if (constant.size() != n) throw ArgumentError("constant gamma: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
      if (constant(i) < spec.gamma_low(i) || constant(i) > spec.gamma_high(i))
        throw RangeError("constant gamma_" + std::to_string(i) + " outside its bounds");
    spec.constant = std::move(constant);
  }
  return spec;
}

Eigen::VectorXd GammaSpec::clamp(const Eigen::VectorXd& gamma) const {
  return gamma.cwiseMax(gamma_low).cwiseMin(gamma_high);
}

Eigen::VectorXd gamma_stubbornness(const Eigen::VectorXd& x, const Network& net) {
  if (static_cast<std::size_t>(x.size()) != net.size())
    throw ArgumentError("gamma_stubbornness: dimension mismatch");
  Eigen::VectorXd gamma(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    gamma(i) = x(i) * (1.0 - x(i)) / net.neighbor_counts()[static_cast<std::size_t>(i)];
  return gamma;
}

Eigen::VectorXd gamma_uniform_random(const GammaSpec& spec, Rng& rng) {
  Eigen::VectorXd gamma(spec.gamma_low.size());
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    const double lo = spec.gamma_low(i);
    const double hi = spec.gamma_high(i);
    if (lo == hi) {
      gamma(i) = lo;
      continue;
    }
    std::uniform_real_distribution<double> draw(lo, hi);
    gamma(i) = draw(rng);
  }
  return gamma;
}

Eigen::VectorXd realize_gamma(const GammaSpec& spec, const Network& net,
                              const Eigen::VectorXd& x, Rng& rng) {
  switch (spec.model) {
    case GammaModel::Stubbornness: return spec.clamp(gamma_stubbornness(x, net));
    case GammaModel::UniformRandom: return gamma_uniform_random(spec, rng);
    case GammaModel::Constant: return spec.constant;
  }
  throw ArgumentError("realize_gamma: unknown model");
}

Eigen::VectorXd weighted_disagreement(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                                      const Network& net) {
  const auto n = net.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x(static_cast<Eigen::Index>(i));
    double acc = 0.0;
    for (const auto& arc : net.out_arcs(i))
      acc += arc.weight * (xi - x(static_cast<Eigen::Index>(arc.to)));
    out(static_cast<Eigen::Index>(i)) = gamma(static_cast<Eigen::Index>(i)) * acc;
  }
  return out;
}

Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                     const Network& net) {
  if (static_cast<std::size_t>(x.size()) != net.size() || gamma.size() != x.size())
    throw ArgumentError("step: dimension mismatch");
  const auto n = net.size();
  Eigen::VectorXd next(x.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double xi = x(ii);
    double acc = 0.0;
    for (const auto& arc : net.out_arcs(i))
      acc += arc.weight * (x(static_cast<Eigen::Index>(arc.to)) - xi);
    next(ii) = xi + gamma(ii) * acc;
  }
  return next;
}

AssumptionFlags check_assumption2(const Eigen::VectorXd& nu_under,
                                  const Eigen::VectorXd& nu_over,
                                  const Eigen::VectorXd& gamma, const Network& net,
                                  const Eigen::VectorXd& x, double slack) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (nu_under.size() != n || nu_over.size() != n || gamma.size() != n || x.size() != n)
    throw ArgumentError("check_assumption2: dimension mismatch");
  const Eigen::VectorXd v = weighted_disagreement(x, gamma, net);
  return {nu_under.dot(v) <= slack, nu_over.dot(v) >= -slack};
}

double spread(const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  return x.maxCoeff() - x.minCoeff();
}

bool TrajectoryRecord::all_under() const {
  return std::all_of(flags.begin(), flags.end(), [](auto f) { return f.under; });
}

bool TrajectoryRecord::all_over() const {
  return std::all_of(flags.begin(), flags.end(), [](auto f) { return f.over; });
}

double TrajectoryRecord::under_rate() const {
  if (flags.empty()) return 1.0;
  auto k = std::count_if(flags.begin(), flags.end(), [](auto f) { return f.under; });
  return static_cast<double>(k) / static_cast<double>(flags.size());
}

double TrajectoryRecord::over_rate() const {
  if (flags.empty()) return 1.0;
  auto k = std::count_if(flags.begin(), flags.end(), [](auto f) { return f.over; });
  return static_cast<double>(k) / static_cast<double>(flags.size());
}

bool TrajectoryRecord::theta_monotone(double slack) const {
  for (std::size_t k = 1; k < theta_under.size(); ++k)
    if (theta_under[k] < theta_under[k - 1] - slack) return false;
  for (std::size_t k = 1; k < theta_over.size(); ++k)
    if (theta_over[k] > theta_over[k - 1] + slack) return false;
  return true;
}

TrajectoryRecord simulate(const Network& net, const Eigen::VectorXd& x0,
                          const GammaSpec& spec,
                          const std::optional<ExtremalEigenvectors>& extremal, Rng& rng,
                          const SimulationOptions& options) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (x0.size() != n || static_cast<Eigen::Index>(spec.size()) != n)
    throw ArgumentError("simulate: dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(x0(i) >= 0.0 && x0(i) <= 1.0))
      throw RangeError("simulate: x0_" + std::to_string(i) + " outside [0,1]");
  if (extremal && (extremal->nu_under.size() != n || extremal->nu_over.size() != n))
    throw ArgumentError("simulate: extremal eigenvector dimension mismatch");

  TrajectoryRecord rec;
  Eigen::VectorXd x = x0;
  auto record = [&](const Eigen::VectorXd& state) {
    if (options.record_states) rec.states.push_back(state);
    if (extremal) {
      rec.theta_under.push_back(extremal->nu_under.dot(state));
      rec.theta_over.push_back(extremal->nu_over.dot(state));
    }
  };
  record(x);

  while (spread(x) > options.tol && rec.steps < options.max_steps) {
    const Eigen::VectorXd gamma = realize_gamma(spec, net, x, rng);
    const Eigen::VectorXd decrement = weighted_disagreement(x, gamma, net);
    if (extremal) {
      rec.flags.push_back({extremal->nu_under.dot(decrement) <= options.slack,
                           extremal->nu_over.dot(decrement) >= -options.slack});
    }
    x -= decrement;
    ++rec.steps;
    record(x);
  }

  rec.converged = spread(x) <= options.tol;
  rec.alpha = 0.5 * (x.maxCoeff() + x.minCoeff());
  rec.final_state = std::move(x);
  return rec;
}

}  // namespace consensus
