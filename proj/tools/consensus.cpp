#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "consensus/bounds.hpp"
#include "consensus/control.hpp"
#include "consensus/errors.hpp"
#include "consensus/harness.hpp"
#include "consensus/netgraph.hpp"
#include "consensus/spectral.hpp"
#include "consensus/textio.hpp"

using namespace consensus;

namespace {

struct GainArgs {
  std::string model = "stubborn";
  double wlow = 0.09;
  double whigh = 0.25;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "gain model: stubborn | uniform")->capture_default_str();
    cmd->add_option("--wlow", wlow, "lower gain scale omega_low")->capture_default_str();
    cmd->add_option("--whigh", whigh, "upper gain scale omega_high")->capture_default_str();
  }
  GammaSpec spec(const Network& net) const {
    return GammaSpec::make(net, wlow, whigh, parse_gamma_model(model));
  }
};

Eigen::VectorXd load_x0(const std::string& path, const Network& net) {
  const auto v = load_vector(path);
  if (v.size() != net.size())
    throw ArgumentError("x0 has " + std::to_string(v.size()) + " entries, network has " +
                        std::to_string(net.size()) + " agents");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

int campaign_status(const CampaignSummary& s) {
  return s.trials > 0 && s.failed + s.unconverged == s.trials ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus-value bounds and impulsive budget allocation"};
  app.require_subcommand(1);
  int status = 0;

  // gen-network
  auto* gen = app.add_subcommand("gen-network", "directed Barabasi-Albert network");
  std::size_t gen_n = 50, gen_m = 2;
  double gen_remove = 0.2;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of agents")->capture_default_str();
  gen->add_option("--m", gen_m, "attachment parameter")->capture_default_str();
  gen->add_option("--remove", gen_remove, "fraction of directed arcs to remove")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output file (stdout if omitted)");
  gen->callback([&] {
    const auto g = generate_directed_ba(gen_n, gen_m, gen_remove, gen_seed);
    emit(format_network(g.network), gen_out);
    std::cerr << "arcs " << g.network.arc_count() << ", removed " << g.arcs_removed << " of "
              << g.arcs_requested << " requested\n";
  });

  // centrality
  auto* cen = app.add_subcommand("centrality", "left null eigenvector of the Laplacian");
  std::string cen_net;
  cen->add_option("--net", cen_net)->required()->check(CLI::ExistingFile);
  cen->callback([&] {
    const auto net = load_network(cen_net);
    std::cout << format_vector_csv(to_std(left_null_eigenvector(net).nu)) << '\n';
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate the dynamics and print a CSV trace");
  std::string sim_net, sim_x0, sim_out;
  GainArgs sim_gain;
  std::uint64_t sim_seed = 1;
  double sim_tol = 1e-9;
  std::size_t sim_max = 1'000'000;
  sim->add_option("--net", sim_net)->required()->check(CLI::ExistingFile);
  sim->add_option("--x0", sim_x0)->required()->check(CLI::ExistingFile);
  sim_gain.attach(sim);
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--tol", sim_tol, "stop when max(x) - min(x) <= tol")->capture_default_str();
  sim->add_option("--max-steps", sim_max)->capture_default_str();
  sim->add_option("--out", sim_out, "output file (stdout if omitted)");
  sim->callback([&] {
    const auto net = load_network(sim_net);
    const auto x0 = load_x0(sim_x0, net);
    const auto spec = sim_gain.spec(net);
    const auto bounds = solve_bounds(net, x0, spec);
    Rng rng(sim_seed);
    SimulationOptions opts;
    opts.tol = sim_tol;
    opts.max_steps = sim_max;
    const auto rec = simulate(net, x0, spec, bounds.extremal(), rng, opts);

    std::ostringstream out;
    out << "step";
    for (std::size_t i = 1; i <= net.size(); ++i) out << ",x_" << i;
    out << ",theta_under,theta_over,flag_low,flag_high\n";
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
      out << k;
      for (double v : rec.states[k]) out << ',' << format_double(v);
      out << ',' << format_double(rec.theta_under[k]) << ',' << format_double(rec.theta_over[k]);
      if (k < rec.flags.size())
        out << ',' << int(rec.flags[k].under) << ',' << int(rec.flags[k].over) << '\n';
      else
        out << ",,\n";
    }
    emit(out.str(), sim_out);
    std::cerr << "alpha " << format_double(rec.alpha) << " steps " << rec.steps
              << (rec.converged ? "" : " (not converged)") << '\n';
    if (!rec.converged) status = 3;
  });

  // bounds
  auto* bnd = app.add_subcommand("bounds", "alpha_min / alpha_max for a network and x0");
  std::string bnd_net, bnd_x0;
  GainArgs bnd_gain;
  bnd->add_option("--net", bnd_net)->required()->check(CLI::ExistingFile);
  bnd->add_option("--x0", bnd_x0)->required()->check(CLI::ExistingFile);
  bnd_gain.attach(bnd);
  bnd->callback([&] {
    const auto net = load_network(bnd_net);
    const auto x0 = load_x0(bnd_x0, net);
    const auto r = solve_bounds(net, x0, bnd_gain.spec(net));
    std::cout << "alpha_min," << format_double(r.alpha_min) << '\n'
              << "alpha_max," << format_double(r.alpha_max) << '\n'
              << "gap," << format_double(r.gap()) << '\n'
              << "conservative_low," << format_double(r.conservative_low) << '\n'
              << "conservative_high," << format_double(r.conservative_high) << '\n'
              << "conservative_gap," << format_double(r.conservative_gap()) << '\n'
              << "gamma_min," << format_vector_csv(to_std(r.gamma_star_low)) << '\n'
              << "gamma_max," << format_vector_csv(to_std(r.gamma_star_high)) << '\n';
  });

  // allocate / evaluate share the problem description
  struct ProblemArgs {
    std::string net, x0;
    int d = 1;
    double umax = 0.2;
    std::size_t nb = 3;
    GainArgs gain;
    void attach(CLI::App* cmd) {
      cmd->add_option("--net", net)->required()->check(CLI::ExistingFile);
      cmd->add_option("--x0", x0)->required()->check(CLI::ExistingFile);
      cmd->add_option("--d", d, "target opinion, 0 or 1")->check(CLI::IsMember({0, 1}))->capture_default_str();
      cmd->add_option("--umax", umax, "per-agent control cap")->capture_default_str();
      cmd->add_option("--nb", nb, "number of fundable agents; budget = nb * umax")->capture_default_str();
      gain.attach(cmd);
    }
    ControlProblem problem() const {
      auto network = load_network(net);
      auto x = load_x0(x0, network);
      auto spec = gain.spec(network);
      auto p = ControlProblem::make(std::move(network), std::move(x), d, umax, nb, std::move(spec));
      p.validate();
      return p;
    }
  };

  auto* alloc = app.add_subcommand("allocate", "allocate the control budget");
  ProblemArgs alloc_args;
  std::string alloc_strategy = "cor1", alloc_out;
  bool exact_flag = false, printed_flag = false;
  unsigned alloc_threads = 0;
  alloc_args.attach(alloc);
  alloc->add_option("--strategy", alloc_strategy, "cor1 | baseline | brute")->capture_default_str();
  alloc->add_flag("--exact-ucap", exact_flag, "cap u~_i by u_max * phi~_i (default)");
  alloc->add_flag("--printed-ucap", printed_flag, "cap u~_i by u_max * chi");
  alloc->add_option("--threads", alloc_threads, "brute-force worker threads (0 = all cores)");
  alloc->add_option("--out", alloc_out, "write the plan to this file");
  alloc->callback([&] {
    if (exact_flag && printed_flag) throw ArgumentError("--exact-ucap and --printed-ucap conflict");
    const auto p = alloc_args.problem();
    Corollary1Options opts;
    opts.exact_ucap = !printed_flag;
    const auto s = parse_strategy(alloc_strategy);
    const auto plan = s == Strategy::BruteForce ? allocate_bruteforce(p, alloc_threads)
                                                : allocate(p, s, opts);
    const auto text = format_plan(plan);
    if (!alloc_out.empty()) write_text_file(alloc_out, text);
    std::cout << "# strategy " << to_string(plan.strategy) << '\n'
              << "# predicted_bound " << format_double(plan.predicted_bound) << '\n'
              << "# budget_used " << format_double(plan.budget_used) << '\n'
              << text;
  });

  auto* eval = app.add_subcommand("evaluate", "simulate a plan and report its evaluation record");
  ProblemArgs eval_args;
  std::string eval_plan;
  std::size_t eval_trials = 100;
  std::uint64_t eval_seed = 1;
  unsigned eval_threads = 0;
  eval_args.attach(eval);
  eval->add_option("--plan", eval_plan, "plan file written by allocate")->required()->check(CLI::ExistingFile);
  eval->add_option("--trials", eval_trials)->capture_default_str();
  eval->add_option("--seed", eval_seed)->capture_default_str();
  eval->add_option("--threads", eval_threads);
  eval->callback([&] {
    const auto p = eval_args.problem();
    AllocationPlan plan;
    plan.u = parse_plan(read_text_file(eval_plan), p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      if (plan.u(static_cast<Eigen::Index>(i)) > 0.0) plan.funded.push_back(i);
    plan.budget_used = plan.u.sum();
    if (plan.budget_used > p.budget * (1 + 1e-12) + 1e-12)
      throw ArgumentError("plan exceeds the budget");
    if (plan.u.size() > 0 && plan.u.maxCoeff() > p.u_max * (1 + 1e-12))
      throw ArgumentError("plan exceeds the per-agent cap");
    plan.predicted_bound = controlled_bound(p, plan.u);
    const auto r = evaluate_allocation(p, plan, eval_trials, eval_seed, eval_threads);
    std::cout << "predicted_bound,alpha_min,alpha_max,alpha_mean,containment_rate,"
                 "assumption_rate,satisfied_containment,trials,converged\n"
              << format_double(r.predicted_bound) << ',' << format_double(r.alpha_min) << ','
              << format_double(r.alpha_max) << ',' << format_double(r.alpha_mean) << ','
              << format_double(r.containment_rate) << ',' << format_double(r.assumption_rate)
              << ',' << format_double(r.satisfied_containment) << ',' << r.trials << ','
              << r.converged << '\n';
  });

  // bound-validation campaigns
  for (int k = 1; k <= 3; ++k) {
    auto* sc = app.add_subcommand("scenario" + std::to_string(k),
                                  "bound-validation campaign, scenario " + std::to_string(k));
    struct Args {
      std::size_t trials = 1000;
      std::uint64_t seed = 1;
      std::string out_dir, config;
      unsigned threads = 0;
    };
    auto args = std::make_shared<Args>();
    sc->add_option("--trials", args->trials)->capture_default_str();
    sc->add_option("--seed", args->seed)->capture_default_str();
    sc->add_option("--out-dir", args->out_dir, "directory for trials.csv, summary.csv, config.txt");
    sc->add_option("--config", args->config, "key = value overrides")->check(CLI::ExistingFile);
    sc->add_option("--threads", args->threads, "worker threads (0 = all cores)");
    sc->callback([&status, sc, args, k] {
      auto cfg = ScenarioConfig::preset(k);
      if (!args->config.empty()) cfg = ScenarioConfig::load(args->config, cfg);
      if (sc->count("--trials")) cfg.trials = args->trials;
      if (sc->count("--seed")) cfg.seed = args->seed;
      if (sc->count("--threads")) cfg.threads = args->threads;
      const auto stats = run_bounds_scenario(cfg);
      if (!args->out_dir.empty()) write_campaign(stats, args->out_dir);
      std::cout << summary_csv(stats.summary);
      status = campaign_status(stats.summary);
    });
  }

  // control experiments
  auto* cs = app.add_subcommand("control-small", "allocation strategies against brute force");
  std::size_t cs_trials = 1000;
  std::uint64_t cs_seed = 1, cs_graph = 1;
  std::string cs_out;
  bool cs_printed = false;
  unsigned cs_threads = 0;
  cs->add_option("--trials", cs_trials, "number of x0 draws")->capture_default_str();
  cs->add_option("--seed", cs_seed)->capture_default_str();
  cs->add_option("--graph-seed", cs_graph)->capture_default_str();
  cs->add_flag("--printed-ucap", cs_printed);
  cs->add_option("--out-dir", cs_out);
  cs->add_option("--threads", cs_threads);
  cs->callback([&] {
    auto cfg = ControlConfig::small_preset();
    cfg.draws = cs_trials;
    cfg.seed = cs_seed;
    cfg.graph_seed = cs_graph;
    cfg.exact_ucap = !cs_printed;
    cfg.threads = cs_threads;
    const auto stats = run_control_experiment(cfg);
    if (!cs_out.empty()) write_control(stats, cs_out);
    std::cout << control_summary_csv(stats.summary);
    if (stats.summary.failed == stats.summary.rows) status = 2;
  });

  auto* cl = app.add_subcommand("control-large", "LP allocation against the baseline on 510 agents");
  std::uint64_t cl_seed = 1;
  std::size_t cl_sims = 1;
  std::string cl_out;
  bool cl_printed = false;
  unsigned cl_threads = 0;
  cl->add_option("--seed", cl_seed)->capture_default_str();
  cl->add_option("--sim-trials", cl_sims, "realised-alpha simulations per plan")->capture_default_str();
  cl->add_flag("--printed-ucap", cl_printed);
  cl->add_option("--out-dir", cl_out);
  cl->add_option("--threads", cl_threads);
  cl->callback([&] {
    auto cfg = ControlConfig::large_preset();
    cfg.seed = cl_seed;
    cfg.sim_trials = cl_sims;
    cfg.exact_ucap = !cl_printed;
    cfg.threads = cl_threads;
    const auto stats = run_control_experiment(cfg);
    if (!cl_out.empty()) write_control(stats, cl_out);
    std::cout << control_summary_csv(stats.summary);
    if (stats.summary.failed == stats.summary.rows) status = 2;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
