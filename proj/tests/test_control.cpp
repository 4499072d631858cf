#include <doctest.h>

#include <random>

#include "consensus/control.hpp"
#include "consensus/errors.hpp"
#include "consensus/spectral.hpp"
#include "oracles.hpp"

using namespace consensus;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd uniform_x0(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

ControlProblem instance(std::size_t n, std::uint64_t seed, int d, std::size_t n_b,
                        std::mt19937_64& rng) {
  auto net = generate_directed_ba(n, 2, 0.2, seed).network;
  auto spec = GammaSpec::make(net, 0.03, 0.25, GammaModel::UniformRandom);
  return ControlProblem::make(net, uniform_x0(n, rng), d, 0.2, n_b, spec);
}

// Post-control bound from corner enumeration, independent of the LP path.
double oracle_bound(const ControlProblem& p, const Eigen::VectorXd& u) {
  auto [lo, hi] = vertex_oracle(p.net, apply_control(p.x0, u, p.d), p.spec);
  return p.d == 1 ? lo : hi;
}

Eigen::VectorXd indicator(std::size_t n, const std::vector<std::size_t>& s, double value) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (auto i : s) u(static_cast<Eigen::Index>(i)) = value;
  return u;
}

void check_plan(const ControlProblem& p, const AllocationPlan& plan) {
  CHECK(plan.u.sum() <= p.budget + 1e-9);
  CHECK(std::abs(plan.budget_used - plan.u.sum()) <= 1e-12);
  for (Eigen::Index i = 0; i < plan.u.size(); ++i) {
    CHECK(plan.u(i) >= -1e-12);
    CHECK(plan.u(i) <= p.u_max + 1e-12);
    CHECK((plan.u(i) == 0.0 || plan.u(i) == p.u_max));
  }
  CHECK(plan.funded.size() == static_cast<std::size_t>((plan.u.array() > 0.0).count()));
}

}  // namespace

TEST_CASE("apply_control") {
  auto x = vec({0.4, 0.1, 0.9});
  CHECK(apply_control(x, Eigen::VectorXd::Zero(3), 1) == x);
  CHECK(apply_control(x, vec({1.0, 0.0, 0.0}), 1)(0) == 1.0);
  CHECK(apply_control(x, vec({0.2, 0.0, 0.0}), 1)(0) == doctest::Approx(0.52).epsilon(1e-15));
  CHECK(apply_control(x, vec({0.0, 0.0, 0.5}), 0)(2) == doctest::Approx(0.45));
  CHECK_THROWS_AS(apply_control(x, vec({0.1}), 1), ArgumentError);
}

TEST_CASE("ControlProblem validation") {
  Network pair(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  auto spec = GammaSpec::make(pair, 0.03, 0.25, GammaModel::UniformRandom);
  CHECK_THROWS_AS(ControlProblem::make(pair, vec({0.2, 0.3}), 2, 0.2, 1, spec), ArgumentError);
  CHECK_THROWS_AS(ControlProblem::make(pair, vec({0.2, 0.3}), 1, 1.2, 1, spec), RangeError);
  CHECK_THROWS_AS(ControlProblem::make(pair, vec({0.2, 0.3}), 1, 0.2, 3, spec), ArgumentError);
  CHECK_THROWS_AS(ControlProblem::with_budget(pair, vec({0.2, 0.3}), 1, 0.2, -1.0, spec),
                  RangeError);
  auto p = ControlProblem::make(pair, vec({0.2, 0.3}), 1, 0.2, 2, spec);
  CHECK(p.budget == doctest::Approx(0.4));
  CHECK(p.nu.sum() == doctest::Approx(1.0));
}

TEST_CASE("influence powers: worked example and ties") {
  auto rho = influence_powers(vec({2.0 / 3.0, 1.0 / 3.0}), vec({0.2, 0.1}), 1);
  CHECK(rho(0) == doctest::Approx(0.8 * 2.0 / 3.0));
  CHECK(rho(1) == doctest::Approx(0.3));

  Network pair(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  auto spec = GammaSpec::make(pair, 0.03, 0.25, GammaModel::UniformRandom);
  auto p = ControlProblem::make(pair, vec({0.2, 0.1}), 1, 0.2, 1, spec);
  // gamma(0) = x(1-x) = [0.16, 0.09]; nu_gamma is proportional to nu / gamma.
  Eigen::VectorXd ng = vec({0.5 / 0.16, 0.5 / 0.09});
  ng /= ng.sum();
  auto expected = influence_powers(ng, p.x0, 1);
  CHECK((influence_powers(p) - expected).cwiseAbs().maxCoeff() <= 1e-14);
  auto plan = allocate_baseline(p);
  CHECK(plan.funded == std::vector<std::size_t>{1});  // rho_1 = 0.9 * 0.64 > 0.8 * 0.36

  std::mt19937_64 rng(1);
  auto q = instance(10, 3, 1, 3, rng);
  q.x0.setConstant(1.0);
  auto tie = allocate_baseline(q);
  CHECK(tie.funded == std::vector<std::size_t>{0, 1, 2});
  CHECK(tie.predicted_bound == doctest::Approx(1.0));
}

TEST_CASE("baseline funds the n_b largest influence powers") {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = instance(15, seed, seed % 2 ? 1 : 0, 4, rng);
    auto rho = influence_powers(p);
    auto plan = allocate_baseline(p);
    check_plan(p, plan);
    REQUIRE(plan.funded.size() == 4);
    double weakest = 1e9;
    for (auto i : plan.funded) weakest = std::min(weakest, rho(static_cast<Eigen::Index>(i)));
    for (Eigen::Index i = 0; i < rho.size(); ++i)
      if (plan.u(i) == 0.0) CHECK(rho(i) <= weakest);
  }
}

TEST_CASE("LP allocation: trivial budgets") {
  std::mt19937_64 rng(3);
  auto p = instance(10, 1, 1, 0, rng);
  auto plan = allocate_corollary1(p);
  CHECK(plan.u.isZero());
  CHECK(plan.predicted_bound ==
        doctest::Approx(solve_bounds(p.net, p.x0, p.spec).alpha_min).epsilon(1e-12));

  auto all = instance(8, 2, 1, 8, rng);
  auto full = allocate_corollary1(all);
  check_plan(all, full);
  CHECK(full.funded.size() == 8);
  CHECK((full.u.array() == 0.2).all());

  auto printed = allocate_corollary1(all, Corollary1Options{false, 1e-6});
  CHECK(printed.funded.size() == 8);
}

TEST_CASE("allocation LP: recovered u respects the true budget (relaxation property)") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = instance(6 + seed % 20, seed, seed % 2 ? 0 : 1, 3, rng);
    auto box = PhiBox::from_spec(p.spec);
    std::vector<bool> active(p.size(), true);
    if (p.size() > 3) active[1] = false;
    for (bool exact : {true, false}) {
      auto sol = solve_corollary1_lp(p.nu, p.x0, box, p.d, p.u_max, p.budget, active, exact);
      CHECK(sol.u.sum() <= p.budget + 1e-9);
      CHECK(sol.u.maxCoeff() <= p.u_max + 1e-12);
      if (p.size() > 3) CHECK(sol.u(1) == 0.0);
      CHECK((sol.phi - box.phi_low).minCoeff() >= -1e-8 * box.phi_high.maxCoeff());
      CHECK((box.phi_high - sol.phi).minCoeff() >= -1e-8 * box.phi_high.maxCoeff());
      CHECK(std::abs(p.nu.dot(sol.phi) * sol.chi - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("brute force: exhaustive n=4, n_b=1 against the corner oracle") {
  std::mt19937_64 rng(5);
  auto p = instance(4, 7, 1, 1, rng);
  auto plan = allocate_bruteforce(p);
  check_plan(p, plan);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double v = oracle_bound(p, indicator(4, {i}, 0.2));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  CHECK(plan.funded == std::vector<std::size_t>{arg});
  CHECK(std::abs(plan.predicted_bound - best) <= 1e-9);
  CHECK(std::abs(controlled_bound(p, plan.u) - best) <= 1e-9);
}

TEST_CASE("brute force: n_b = n and enumeration cap") {
  std::mt19937_64 rng(6);
  auto p = instance(6, 2, 1, 6, rng);
  auto plan = allocate_bruteforce(p);
  CHECK(plan.funded.size() == 6);
  CHECK(binomial(12, 3) == 220);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
  auto big = instance(40, 1, 1, 20, rng);
  CHECK_THROWS_AS(allocate_bruteforce(big), TooLarge);
}

TEST_CASE("dominance chain (property)") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int d = seed % 3 == 0 ? 0 : 1;
    auto p = instance(5 + seed % 6, seed, d, 1 + seed % 3, rng);
    auto brute = allocate_bruteforce(p, 1);
    auto cor1 = allocate_corollary1(p);
    auto base = allocate_baseline(p);
    auto none = allocate(p, Strategy::None);
    for (const auto* plan : {&brute, &cor1, &base, &none}) check_plan(p, *plan);
    const double sign = d == 1 ? 1.0 : -1.0;
    CHECK(sign * (brute.predicted_bound - cor1.predicted_bound) >= -1e-12);
    CHECK(sign * (brute.predicted_bound - base.predicted_bound) >= -1e-12);
    CHECK(sign * (cor1.predicted_bound - none.predicted_bound) >= -1e-12);
    // Predicted bounds agree with corner enumeration.
    CHECK(std::abs(brute.predicted_bound - oracle_bound(p, brute.u)) <= 1e-9);
    CHECK(std::abs(cor1.predicted_bound - oracle_bound(p, cor1.u)) <= 1e-9);
  }
}

TEST_CASE("LP allocation is monotone in the budget (property)") {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto base = instance(12 + seed, seed, 1, 0, rng);
    double prev = -1.0;
    for (int k = 0; k <= 6; ++k) {
      auto p = ControlProblem::with_budget(base.net, base.x0, 1, 0.2, 0.2 * k, base.spec);
      const double v = allocate_corollary1(p).predicted_bound;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("d=0 / d=1 symmetry of brute force") {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p1 = instance(8, seed, 1, 2, rng);
    Eigen::VectorXd flipped = Eigen::VectorXd::Ones(8) - p1.x0;
    auto p0 = ControlProblem::make(p1.net, flipped, 0, p1.u_max, p1.n_b, p1.spec);
    auto a = allocate_bruteforce(p1);
    auto b = allocate_bruteforce(p0);
    CHECK(a.funded == b.funded);
    CHECK(std::abs(a.predicted_bound - (1.0 - b.predicted_bound)) <= 1e-9);
  }
}

TEST_CASE("evaluate_allocation") {
  std::mt19937_64 rng(10);
  SUBCASE("zero plan at consensus") {
    auto p = instance(10, 4, 1, 2, rng);
    p.x0.setConstant(0.35);
    auto zero = allocate(p, Strategy::None);
    auto rec = evaluate_allocation(p, zero, 5, 1, 1);
    CHECK(rec.converged == 5);
    for (double a : rec.alphas) CHECK(a == doctest::Approx(0.35));
    CHECK(rec.containment_rate == 1.0);
  }
  SUBCASE("containment on assumption-satisfying runs") {
    auto p = instance(20, 5, 1, 3, rng);
    p.spec = GammaSpec::make(p.net, 0.09, 0.25, GammaModel::Stubbornness);
    auto plan = allocate_corollary1(p);
    auto rec = evaluate_allocation(p, plan, 20, 7, 1);
    CHECK(rec.converged == 20);
    CHECK(rec.satisfied_containment == 1.0);
    CHECK(rec.predicted_bound == doctest::Approx(plan.predicted_bound).epsilon(1e-12));
    auto again = evaluate_allocation(p, plan, 20, 7, 2);
    CHECK(again.alphas == rec.alphas);
  }
}

TEST_CASE("plan text round trip") {
  AllocationPlan plan;
  plan.u = vec({0.0, 0.2, 0.0, 0.2});
  auto text = format_plan(plan);
  CHECK(text == "1 0.2\n3 0.2\n");
  CHECK(parse_plan(text, 4) == plan.u);
  CHECK(parse_plan("# c\n1,0.2\n", 4)(1) == 0.2);
  CHECK_THROWS_AS(parse_plan("9 0.2\n", 4), ParseError);
  CHECK_THROWS_AS(parse_plan("1 x\n", 4), ParseError);
  CHECK(parse_strategy("brute") == Strategy::BruteForce);
  CHECK_THROWS_AS(parse_strategy("magic"), ArgumentError);
}
