#include "consensus/bounds.hpp"

#include <cmath>
#include <string>

#include "consensus/errors.hpp"
#include "consensus/spectral.hpp"
#include "consensus/textio.hpp"

namespace consensus {

PhiBox PhiBox::from_spec(const GammaSpec& spec) {
  PhiBox box;
  box.phi_low = spec.gamma_high.cwiseInverse();
  box.phi_high = spec.gamma_low.cwiseInverse();
  box.validate();
  return box;
}

void PhiBox::validate() const {
  if (phi_low.size() != phi_high.size()) throw ArgumentError("phi box: dimension mismatch");
  for (Eigen::Index i = 0; i < phi_low.size(); ++i)
    if (!(phi_low(i) > 0.0 && phi_low(i) <= phi_high(i) && std::isfinite(phi_high(i))))
      throw RangeError("0 < phi_low <= phi_high violated at agent " + std::to_string(i));
}

double FractionalProgram::evaluate(const Eigen::VectorXd& phi) const {
  return numerator.dot(phi) / denominator.dot(phi);
}

namespace {

void check_inputs(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0, const PhiBox& box) {
  if (nu.size() != x0.size() || static_cast<std::size_t>(nu.size()) != box.size())
    throw ArgumentError("bounds: dimension mismatch");
  if (nu.size() == 0) throw ArgumentError("bounds: empty problem");
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (!(nu(i) > 0.0)) throw ArgumentError("bounds: nu must be positive");
    if (!(x0(i) >= 0.0 && x0(i) <= 1.0))
      throw RangeError("bounds: x0_" + std::to_string(i) + " outside [0,1]");
  }
}

// Snaps gamma = 1/phi onto an endpoint of [1/phi_high, 1/phi_low] when it is
// within kSnapTolerance of one.
Eigen::VectorXd recover_gamma(const Eigen::VectorXd& phi, const PhiBox& box) {
  Eigen::VectorXd gamma = phi.cwiseInverse();
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    const double lo = 1.0 / box.phi_high(i);
    const double hi = 1.0 / box.phi_low(i);
    if (std::abs(gamma(i) - lo) <= kSnapTolerance)
      gamma(i) = lo;
    else if (std::abs(gamma(i) - hi) <= kSnapTolerance)
      gamma(i) = hi;
  }
  return gamma;
}

}  // namespace

FractionalProgram build_lfp(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                            const PhiBox& box, Direction direction) {
  check_inputs(nu, x0, box);
  return {nu.cwiseProduct(x0), nu, box, direction};
}

LinearProgram charnes_cooper(const FractionalProgram& lfp) {
  const auto n = lfp.numerator.size();
  auto lp = LinearProgram::with_variables(
      static_cast<std::size_t>(n + 1),
      lfp.direction == Direction::Minimize ? Sense::Minimize : Sense::Maximize);
  lp.c.head(n) = lfp.numerator;
  lp.lower(n) = kTauFloor;

  lp.a_ineq = Eigen::MatrixXd::Zero(2 * n, n + 1);
  lp.b_ineq = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lp.a_ineq(i, i) = 1.0;
    lp.a_ineq(i, n) = -lfp.box.phi_high(i);
    lp.a_ineq(n + i, i) = -1.0;
    lp.a_ineq(n + i, n) = lfp.box.phi_low(i);
  }
  lp.a_eq = Eigen::MatrixXd::Zero(1, n + 1);
  lp.a_eq.row(0).head(n) = lfp.denominator.transpose();
  lp.b_eq = Eigen::VectorXd::Ones(1);
  return lp;
}

FractionalOptimum solve_fractional(const FractionalProgram& lfp) {
  const auto lp = charnes_cooper(lfp);
  const auto sol = solve_lp(lp);
  if (!sol.optimal())
    throw LpFailure(std::string("bounds LP not optimal: ") + std::string(to_string(sol.status)));
  const auto n = lfp.numerator.size();
  FractionalOptimum out;
  out.tau = sol.z(n);
  if (out.tau <= 2.0 * kTauFloor)
    throw DegenerateTau("Charnes-Cooper scale at its floor (tau = " + format_double(out.tau) +
                        ")");
  out.phi = sol.z.head(n) / out.tau;
  // Clip solver noise back into the box before the value is reported.
  out.phi = out.phi.cwiseMax(lfp.box.phi_low).cwiseMin(lfp.box.phi_high);
  out.value = lfp.evaluate(out.phi);
  return out;
}

double solve_single_bound(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                          const PhiBox& box, Direction direction) {
  const auto opt = solve_fractional(build_lfp(nu, x0, box, direction));
  const Eigen::VectorXd nu_gamma = scaled_eigenvector(nu, recover_gamma(opt.phi, box));
  return nu_gamma.dot(x0);
}

BoundsResult solve_bounds(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                          const PhiBox& box) {
  check_inputs(nu, x0, box);
  const auto lower = solve_fractional(build_lfp(nu, x0, box, Direction::Minimize));
  const auto upper = solve_fractional(build_lfp(nu, x0, box, Direction::Maximize));

  BoundsResult r;
  r.gamma_star_low = recover_gamma(lower.phi, box);
  r.gamma_star_high = recover_gamma(upper.phi, box);
  r.nu_under = scaled_eigenvector(nu, r.gamma_star_low);
  r.nu_over = scaled_eigenvector(nu, r.gamma_star_high);
  r.alpha_min = r.nu_under.dot(x0);
  r.alpha_max = r.nu_over.dot(x0);
  std::tie(r.conservative_low, r.conservative_high) = conservative_bounds(x0);

  constexpr double tol = 1e-10;
  if (std::abs(r.alpha_min - lower.value) > 1e-8 || std::abs(r.alpha_max - upper.value) > 1e-8)
    throw InvariantError("bounds: recovered eigenvector disagrees with LP optimum");
  if (!(r.conservative_low - tol <= r.alpha_min && r.alpha_min <= r.alpha_max + tol &&
        r.alpha_max <= r.conservative_high + tol))
    throw InvariantError("bounds: conservative_low <= alpha_min <= alpha_max <= "
                         "conservative_high violated");
  if (std::abs(r.nu_under.sum() - 1.0) > tol || std::abs(r.nu_over.sum() - 1.0) > tol ||
      !(r.nu_under.minCoeff() > 0.0) || !(r.nu_over.minCoeff() > 0.0))
    throw InvariantError("bounds: extremal eigenvectors not positive and normalized");
  return r;
}

BoundsResult solve_bounds(const Network& net, const Eigen::VectorXd& x0,
                          const GammaSpec& spec) {
  if (static_cast<std::size_t>(x0.size()) != net.size() || spec.size() != net.size())
    throw ArgumentError("solve_bounds: dimension mismatch");
  const auto centrality = left_null_eigenvector(net);
  return solve_bounds(centrality.nu, x0, PhiBox::from_spec(spec));
}

std::pair<double, double> vertex_oracle(const Eigen::VectorXd& nu, const Eigen::VectorXd& x0,
                                        const PhiBox& box) {
  check_inputs(nu, x0, box);
  const auto n = nu.size();
  if (n > 20) throw TooLarge("vertex_oracle: n > 20");
  const auto corners = std::size_t{1} << n;
  double lo = kInf, hi = -kInf;
  Eigen::VectorXd phi(n);
  for (std::size_t mask = 0; mask < corners; ++mask) {
    for (Eigen::Index i = 0; i < n; ++i)
      phi(i) = (mask >> i) & 1U ? box.phi_high(i) : box.phi_low(i);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num += nu(i) * phi(i) * x0(i);
      den += nu(i) * phi(i);
    }
    const double v = num / den;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::pair<double, double> vertex_oracle(const Network& net, const Eigen::VectorXd& x0,
                                        const GammaSpec& spec) {
  if (net.size() > 20) throw TooLarge("vertex_oracle: n > 20");
  return vertex_oracle(left_null_eigenvector(net).nu, x0, PhiBox::from_spec(spec));
}

std::pair<double, double> conservative_bounds(const Eigen::VectorXd& x0) {
  if (x0.size() == 0) throw ArgumentError("conservative_bounds: empty vector");
  return {x0.minCoeff(), x0.maxCoeff()};
}

}  // namespace consensus
