#include "consensus/harness.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "consensus/bounds.hpp"
#include "consensus/errors.hpp"
#include "consensus/parallel.hpp"
#include "consensus/spectral.hpp"
#include "consensus/textio.hpp"

namespace consensus {

std::string_view to_string(X0Sampler s) { return s == X0Sampler::Beta ? "beta" : "uniform"; }

X0Sampler parse_sampler(std::string_view name) {
  if (name == "uniform") return X0Sampler::Uniform;
  if (name == "beta") return X0Sampler::Beta;
  throw ArgumentError("unknown x0 sampler '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Configuration text

namespace {

using Setter = std::function<bool(ScenarioConfig&, std::string_view)>;

template <class T>
Setter size_field(T ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, std::string_view v) {
    std::size_t out = 0;
    if (!parse_size(v, out)) return false;
    c.*field = static_cast<T>(out);
    return true;
  };
}

Setter double_field(double ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, std::string_view v) { return parse_double(v, c.*field); };
}

const std::map<std::string, Setter, std::less<>>& scenario_setters() {
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"id", [](ScenarioConfig& c, std::string_view v) { c.id = std::string(v); return !v.empty(); }},
      {"n_min", size_field(&ScenarioConfig::n_min)},
      {"n_max", size_field(&ScenarioConfig::n_max)},
      {"m", size_field(&ScenarioConfig::m)},
      {"removal_fraction", double_field(&ScenarioConfig::removal_fraction)},
      {"sampler",
       [](ScenarioConfig& c, std::string_view v) {
         c.sampler = parse_sampler(v);
         return true;
       }},
      {"lo", double_field(&ScenarioConfig::lo)},
      {"hi", double_field(&ScenarioConfig::hi)},
      {"beta_a", double_field(&ScenarioConfig::beta_a)},
      {"beta_b", double_field(&ScenarioConfig::beta_b)},
      {"gamma_model",
       [](ScenarioConfig& c, std::string_view v) {
         c.gamma_model = parse_gamma_model(v);
         return true;
       }},
      {"omega_low", double_field(&ScenarioConfig::omega_low)},
      {"omega_high", double_field(&ScenarioConfig::omega_high)},
      {"trials", size_field(&ScenarioConfig::trials)},
      {"seed", size_field(&ScenarioConfig::seed)},
      {"max_steps", size_field(&ScenarioConfig::max_steps)},
      {"tol", double_field(&ScenarioConfig::tol)},
      {"threads", size_field(&ScenarioConfig::threads)},
  };
  return setters;
}

}  // namespace

ScenarioConfig ScenarioConfig::preset(int scenario) {
  ScenarioConfig c;
  switch (scenario) {
    case 1:
      c.id = "scenario1";
      break;
    case 2:
      c.id = "scenario2";
      c.gamma_model = GammaModel::UniformRandom;
      break;
    case 3:
      c.id = "scenario3";
      c.sampler = X0Sampler::Beta;
      c.beta_a = 2.0;
      c.beta_b = 5.0;
      break;
    default:
      throw ArgumentError("scenario must be 1, 2 or 3");
  }
  return c;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text, ScenarioConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const auto& setters = scenario_setters();
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + std::string(key) + "'", lineno);
    bool ok = false;
    try {
      ok = it->second(base, value);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!ok) throw ParseError("bad value for '" + std::string(key) + "'", lineno);
  }
  base.validate();
  return base;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  return parse(text, ScenarioConfig{});
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path, ScenarioConfig base) {
  return parse(read_text_file(path), std::move(base));
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  return load(path, ScenarioConfig{});
}

std::string ScenarioConfig::to_text() const {
  std::ostringstream out;
  out << "id = " << id << '\n'
      << "n_min = " << n_min << '\n'
      << "n_max = " << n_max << '\n'
      << "m = " << m << '\n'
      << "removal_fraction = " << format_double(removal_fraction) << '\n'
      << "sampler = " << to_string(sampler) << '\n'
      << "lo = " << format_double(lo) << '\n'
      << "hi = " << format_double(hi) << '\n'
      << "beta_a = " << format_double(beta_a) << '\n'
      << "beta_b = " << format_double(beta_b) << '\n'
      << "gamma_model = " << to_string(gamma_model) << '\n'
      << "omega_low = " << format_double(omega_low) << '\n'
      << "omega_high = " << format_double(omega_high) << '\n'
      << "trials = " << trials << '\n'
      << "seed = " << seed << '\n'
      << "max_steps = " << max_steps << '\n'
      << "tol = " << format_double(tol) << '\n';
  return out.str();
}

void ScenarioConfig::validate() const {
  if (trials < 1) throw RangeError("trials >= 1 violated");
  if (n_min < m + 1 || n_min > n_max) throw RangeError("m + 1 <= n_min <= n_max violated");
  if (m < 1) throw RangeError("m >= 1 violated");
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0))
    throw RangeError("removal_fraction in [0,1) violated");
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw RangeError("0 <= lo < hi <= 1 violated");
  if (sampler == X0Sampler::Beta && !(beta_a > 0.0 && beta_b > 0.0))
    throw RangeError("beta parameters must be positive");
  if (!(omega_low > 0.0 && omega_low <= omega_high && omega_high <= 1.0))
    throw RangeError("0 < omega_low <= omega_high <= 1 violated");
  if (gamma_model == GammaModel::Constant)
    throw ArgumentError("campaigns need a stubbornness or uniform gain model");
  if (!(tol > 0.0) || max_steps < 1) throw RangeError("tol > 0 and max_steps >= 1 required");
}

// ---------------------------------------------------------------------------
// Samplers

Eigen::VectorXd sample_x0_uniform(std::size_t n, double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw ArgumentError("sample_x0_uniform: lo < hi required");
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = dist(rng);
  return x;
}

Eigen::VectorXd sample_x0_beta(std::size_t n, double a, double b, double lo, double hi, Rng& rng) {
  if (!(a > 0.0 && b > 0.0)) throw ArgumentError("sample_x0_beta: a, b > 0 required");
  if (!(lo <= hi)) throw ArgumentError("sample_x0_beta: lo <= hi required");
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) {
    const double p = ga(rng);
    const double q = gb(rng);
    v = lo + (hi - lo) * (p / (p + q));
  }
  return x;
}

Eigen::VectorXd sample_x0(const ScenarioConfig& cfg, std::size_t n, Rng& rng) {
  return cfg.sampler == X0Sampler::Beta
             ? sample_x0_beta(n, cfg.beta_a, cfg.beta_b, cfg.lo, cfg.hi, rng)
             : sample_x0_uniform(n, cfg.lo, cfg.hi, rng);
}

// ---------------------------------------------------------------------------
// Bound-validation campaigns

TrialRow run_bounds_trial(const ScenarioConfig& cfg, std::size_t index) {
  TrialRow row;
  row.index = index;
  try {
    Rng rng(derive_seed(cfg.seed, index));
    std::uniform_int_distribution<std::size_t> size_dist(cfg.n_min, cfg.n_max);
    row.n = size_dist(rng);
    const auto graph_seed = rng();
    auto graph = generate_directed_ba(row.n, cfg.m, cfg.removal_fraction, graph_seed);
    row.arcs = graph.network.arc_count();
    row.removed_fraction = graph.realized_fraction();
    const Eigen::VectorXd x0 = sample_x0(cfg, row.n, rng);

    const auto spec = GammaSpec::make(graph.network, cfg.omega_low, cfg.omega_high,
                                      cfg.gamma_model);
    const auto bounds = solve_bounds(graph.network, x0, spec);
    row.alpha_min = bounds.alpha_min;
    row.alpha_max = bounds.alpha_max;
    row.conservative_low = bounds.conservative_low;
    row.conservative_high = bounds.conservative_high;

    SimulationOptions opts;
    opts.record_states = false;
    opts.tol = cfg.tol;
    opts.max_steps = cfg.max_steps;
    const auto rec = simulate(graph.network, x0, spec, bounds.extremal(), rng, opts);
    row.alpha = rec.alpha;
    row.steps = rec.steps;
    row.converged = rec.converged;
    row.under_rate = rec.under_rate();
    row.over_rate = rec.over_rate();
    row.all_under = rec.all_under();
    row.all_over = rec.all_over();
    row.monotone = rec.theta_monotone();
    row.contained = rec.alpha >= bounds.alpha_min - kContainmentSlack &&
                    rec.alpha <= bounds.alpha_max + kContainmentSlack;
  } catch (const std::exception& e) {
    row.error = e.what();
    if (row.error.empty()) row.error = "unknown error";
  }
  return row;
}

CampaignStats run_bounds_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  CampaignStats stats;
  stats.config = cfg;
  stats.rows.resize(cfg.trials);
  parallel_for(
      cfg.trials, [&](std::size_t i) { stats.rows[i] = run_bounds_trial(cfg, i); }, cfg.threads);
  stats.summary = summarize(stats.rows);
  return stats;
}

CampaignSummary summarize(const std::vector<TrialRow>& rows) {
  CampaignSummary s;
  s.trials = rows.size();
  std::size_t used = 0, under = 0, over = 0, both = 0, inside = 0, sat_inside = 0, sat_mono = 0;
  double gap = 0.0, cgap = 0.0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    if (!r.converged) {
      ++s.unconverged;
      continue;
    }
    ++used;
    gap += r.gap();
    cgap += r.conservative_gap();
    under += r.all_under;
    over += r.all_over;
    inside += r.contained;
    if (r.both()) {
      ++both;
      sat_inside += r.contained;
      sat_mono += r.monotone;
    }
  }
  if (used > 0) {
    const auto u = static_cast<double>(used);
    s.mean_gap = gap / u;
    s.mean_conservative_gap = cgap / u;
    s.under_pct = 100.0 * static_cast<double>(under) / u;
    s.over_pct = 100.0 * static_cast<double>(over) / u;
    s.both_pct = 100.0 * static_cast<double>(both) / u;
    s.containment_pct = 100.0 * static_cast<double>(inside) / u;
  }
  if (both > 0) {
    s.satisfied_containment_pct = 100.0 * static_cast<double>(sat_inside) / static_cast<double>(both);
    s.satisfied_monotone_pct = 100.0 * static_cast<double>(sat_mono) / static_cast<double>(both);
  }
  return s;
}

namespace {

constexpr const char* kTrialsHeader =
    "index,n,arcs,removed_fraction,alpha_min,alpha_max,alpha,gap,conservative_low,"
    "conservative_high,conservative_gap,under_rate,over_rate,all_under,all_over,both,"
    "contained,monotone,converged,steps,error";

constexpr const char* kSummaryHeader =
    "trials,failed,unconverged,mean_gap,mean_conservative_gap,under_pct,over_pct,both_pct,"
    "containment_pct,satisfied_containment_pct,satisfied_monotone_pct";

std::string csv_safe(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

std::vector<std::string_view> data_lines(const std::string& text, const char* header) {
  std::vector<std::string_view> lines;
  std::string_view all(text);
  std::size_t start = 0;
  while (start < all.size()) {
    auto end = all.find('\n', start);
    if (end == std::string_view::npos) end = all.size();
    auto line = all.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty() || lines.front() != header) throw ParseError("unexpected CSV header", 1);
  lines.erase(lines.begin());
  return lines;
}

double field_double(std::string_view f, std::size_t line) {
  double v = 0.0;
  if (!parse_double(f, v)) throw ParseError("bad number '" + std::string(f) + "'", line);
  return v;
}

std::size_t field_size(std::string_view f, std::size_t line) {
  std::size_t v = 0;
  if (!parse_size(f, v)) throw ParseError("bad integer '" + std::string(f) + "'", line);
  return v;
}

bool field_bool(std::string_view f, std::size_t line) {
  if (f == "1") return true;
  if (f == "0") return false;
  throw ParseError("bad flag '" + std::string(f) + "'", line);
}

}  // namespace

std::string trials_csv(const std::vector<TrialRow>& rows) {
  std::ostringstream out;
  out << kTrialsHeader << '\n';
  for (const auto& r : rows) {
    out << r.index << ',' << r.n << ',' << r.arcs << ',' << format_double(r.removed_fraction)
        << ',' << format_double(r.alpha_min) << ',' << format_double(r.alpha_max) << ','
        << format_double(r.alpha) << ',' << format_double(r.gap()) << ','
        << format_double(r.conservative_low) << ',' << format_double(r.conservative_high) << ','
        << format_double(r.conservative_gap()) << ',' << format_double(r.under_rate) << ','
        << format_double(r.over_rate) << ',' << int(r.all_under) << ',' << int(r.all_over) << ','
        << int(r.both()) << ',' << int(r.contained) << ',' << int(r.monotone) << ','
        << int(r.converged) << ',' << r.steps << ',' << csv_safe(r.error) << '\n';
  }
  return out.str();
}

std::vector<TrialRow> parse_trials_csv(const std::string& text) {
  std::vector<TrialRow> rows;
  std::size_t lineno = 1;
  for (auto line : data_lines(text, kTrialsHeader)) {
    ++lineno;
    const auto f = split(line, ',');
    if (f.size() != 21) throw ParseError("expected 21 fields", lineno);
    TrialRow r;
    r.index = field_size(f[0], lineno);
    r.n = field_size(f[1], lineno);
    r.arcs = field_size(f[2], lineno);
    r.removed_fraction = field_double(f[3], lineno);
    r.alpha_min = field_double(f[4], lineno);
    r.alpha_max = field_double(f[5], lineno);
    r.alpha = field_double(f[6], lineno);
    r.conservative_low = field_double(f[8], lineno);
    r.conservative_high = field_double(f[9], lineno);
    r.under_rate = field_double(f[11], lineno);
    r.over_rate = field_double(f[12], lineno);
    r.all_under = field_bool(f[13], lineno);
    r.all_over = field_bool(f[14], lineno);
    r.contained = field_bool(f[16], lineno);
    r.monotone = field_bool(f[17], lineno);
    r.converged = field_bool(f[18], lineno);
    r.steps = field_size(f[19], lineno);
    r.error = std::string(f[20]);
    if (field_bool(f[15], lineno) != r.both())
      throw InvariantError("trials.csv line " + std::to_string(lineno) +
                           ": both != all_under && all_over");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_csv(const CampaignSummary& s) {
  std::ostringstream out;
  out << kSummaryHeader << '\n'
      << s.trials << ',' << s.failed << ',' << s.unconverged << ',' << format_double(s.mean_gap)
      << ',' << format_double(s.mean_conservative_gap) << ',' << format_double(s.under_pct)
      << ',' << format_double(s.over_pct) << ',' << format_double(s.both_pct) << ','
      << format_double(s.containment_pct) << ',' << format_double(s.satisfied_containment_pct)
      << ',' << format_double(s.satisfied_monotone_pct) << '\n';
  return out.str();
}

CampaignSummary parse_summary_csv(const std::string& text) {
  const auto lines = data_lines(text, kSummaryHeader);
  if (lines.size() != 1) throw ParseError("summary.csv must have exactly one data row", 2);
  const auto f = split(lines[0], ',');
  if (f.size() != 11) throw ParseError("expected 11 fields", 2);
  CampaignSummary s;
  s.trials = field_size(f[0], 2);
  s.failed = field_size(f[1], 2);
  s.unconverged = field_size(f[2], 2);
  s.mean_gap = field_double(f[3], 2);
  s.mean_conservative_gap = field_double(f[4], 2);
  s.under_pct = field_double(f[5], 2);
  s.over_pct = field_double(f[6], 2);
  s.both_pct = field_double(f[7], 2);
  s.containment_pct = field_double(f[8], 2);
  s.satisfied_containment_pct = field_double(f[9], 2);
  s.satisfied_monotone_pct = field_double(f[10], 2);
  return s;
}

void write_campaign(const CampaignStats& stats, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "trials.csv", trials_csv(stats.rows));
  write_text_file(dir / "summary.csv", summary_csv(stats.summary));
  write_text_file(dir / "config.txt", stats.config.to_text());
}

CampaignStats load_campaign(const std::filesystem::path& dir) {
  CampaignStats stats;
  stats.config = ScenarioConfig::load(dir / "config.txt");
  stats.rows = parse_trials_csv(read_text_file(dir / "trials.csv"));
  const auto stored = parse_summary_csv(read_text_file(dir / "summary.csv"));
  stats.summary = summarize(stats.rows);
  const auto& s = stats.summary;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  if (s.trials != stored.trials || s.failed != stored.failed ||
      s.unconverged != stored.unconverged || !close(s.mean_gap, stored.mean_gap) ||
      !close(s.mean_conservative_gap, stored.mean_conservative_gap) ||
      !close(s.under_pct, stored.under_pct) || !close(s.over_pct, stored.over_pct) ||
      !close(s.both_pct, stored.both_pct) || !close(s.containment_pct, stored.containment_pct) ||
      !close(s.satisfied_containment_pct, stored.satisfied_containment_pct) ||
      !close(s.satisfied_monotone_pct, stored.satisfied_monotone_pct))
    throw InvariantError("summary.csv does not match the aggregates of trials.csv");
  return stats;
}

// ---------------------------------------------------------------------------
// Control experiments

ControlConfig ControlConfig::small_preset() { return {}; }

ControlConfig ControlConfig::large_preset() {
  ControlConfig c;
  c.mode = ControlMode::Large;
  c.n = 510;
  c.n_b = 50;
  c.draws = 0;
  for (int k = 0; k <= 12; ++k) c.beta_grid.push_back(0.5 + 0.25 * k);
  return c;
}

void ControlConfig::validate() const {
  if (n < m + 1) throw RangeError("n >= m + 1 violated");
  if (!(u_max >= 0.0 && u_max <= 1.0)) throw RangeError("0 <= u_max <= 1 violated");
  if (n_b > n) throw RangeError("n_b <= n violated");
  if (!(omega_low > 0.0 && omega_low <= omega_high && omega_high <= 1.0))
    throw RangeError("0 < omega_low <= omega_high <= 1 violated");
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw RangeError("0 <= lo < hi <= 1 violated");
  if (mode == ControlMode::Small && draws < 1) throw RangeError("draws >= 1 violated");
  if (mode == ControlMode::Large) {
    if (beta_grid.empty()) throw RangeError("beta grid must not be empty");
    for (double b : beta_grid)
      if (!(b > 0.0)) throw RangeError("beta grid values must be positive");
  }
  if (mode == ControlMode::Small && binomial(n, n_b) > kBruteForceCap)
    throw TooLarge("brute force refused: C(n, n_b) exceeds the enumeration cap");
}

std::string ControlConfig::to_text() const {
  std::ostringstream out;
  out << "mode = " << (mode == ControlMode::Small ? "small" : "large") << '\n'
      << "n = " << n << '\n'
      << "m = " << m << '\n'
      << "removal_fraction = " << format_double(removal_fraction) << '\n'
      << "graph_seed = " << graph_seed << '\n'
      << "u_max = " << format_double(u_max) << '\n'
      << "n_b = " << n_b << '\n'
      << "omega_low = " << format_double(omega_low) << '\n'
      << "omega_high = " << format_double(omega_high) << '\n'
      << "gamma_model = " << to_string(gamma_model) << '\n'
      << "lo = " << format_double(lo) << '\n'
      << "hi = " << format_double(hi) << '\n'
      << "draws = " << draws << '\n'
      << "beta_grid = " << format_vector_csv(beta_grid) << '\n'
      << "sim_trials = " << sim_trials << '\n'
      << "exact_ucap = " << int(exact_ucap) << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

std::pair<Network, GammaSpec> control_network(const ControlConfig& cfg) {
  auto graph = generate_directed_ba(cfg.n, cfg.m, cfg.removal_fraction, cfg.graph_seed);
  auto spec = GammaSpec::make(graph.network, cfg.omega_low, cfg.omega_high, cfg.gamma_model);
  return {std::move(graph.network), std::move(spec)};
}

namespace {

std::string funded_text(const AllocationPlan& plan) {
  std::string out;
  for (auto i : plan.funded) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i);
  }
  return out;
}

double realised_alpha(const ControlProblem& p, const AllocationPlan& plan, std::size_t trials,
                      std::uint64_t seed) {
  const Eigen::VectorXd x = apply_control(p.x0, plan.u, p.d);
  SimulationOptions opts;
  opts.record_states = false;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const auto rec = simulate(p.net, x, p.spec, std::nullopt, rng, opts);
    if (!rec.converged) continue;
    sum += rec.alpha;
    ++used;
  }
  if (used == 0) throw Error("no realised-alpha simulation converged");
  return sum / static_cast<double>(used);
}

}  // namespace

ControlStats run_control_experiment(const ControlConfig& cfg) {
  cfg.validate();
  const auto [net, spec] = control_network(cfg);
  const Eigen::VectorXd nu = left_null_eigenvector(net).nu;
  Corollary1Options cor1;
  cor1.exact_ucap = cfg.exact_ucap;

  const bool large = cfg.mode == ControlMode::Large;
  const std::size_t grid = cfg.beta_grid.size();
  const std::size_t count = large ? grid * grid : cfg.draws;

  ControlStats stats;
  stats.config = cfg;
  stats.rows.resize(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        ControlRow& row = stats.rows[i];
        row.index = i;
        try {
          Rng rng(derive_seed(cfg.seed, i));
          Eigen::VectorXd x0;
          if (large) {
            row.beta_a = cfg.beta_grid[i / grid];
            row.beta_b = cfg.beta_grid[i % grid];
            x0 = sample_x0_beta(cfg.n, row.beta_a, row.beta_b, cfg.lo, cfg.hi, rng);
          } else {
            x0 = sample_x0_uniform(cfg.n, cfg.lo, cfg.hi, rng);
          }
          ControlProblem p{net, x0, 1, cfg.u_max, cfg.u_max * static_cast<double>(cfg.n_b),
                           cfg.n_b, spec, nu};
          p.validate();
          row.bound_none = controlled_bound(p, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.n)));
          const auto c = allocate_corollary1(p, cor1);
          const auto b = allocate_baseline(p);
          row.bound_cor1 = c.predicted_bound;
          row.bound_base = b.predicted_bound;
          row.funded_cor1 = funded_text(c);
          row.funded_base = funded_text(b);
          if (large) {
            row.bound_brute = std::nan("");
            const auto sim_seed = rng();
            row.alpha_cor1 = realised_alpha(p, c, cfg.sim_trials, sim_seed);
            row.alpha_base = realised_alpha(p, b, cfg.sim_trials, sim_seed);
          } else {
            const auto bf = allocate_bruteforce(p, 1);
            row.bound_brute = bf.predicted_bound;
            row.funded_brute = funded_text(bf);
            row.alpha_cor1 = row.alpha_base = std::nan("");
          }
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      },
      cfg.threads);
  stats.summary = summarize(cfg, stats.rows);
  return stats;
}

ControlSummary summarize(const ControlConfig& cfg, const std::vector<ControlRow>& rows) {
  ControlSummary s;
  s.rows = rows.size();
  const bool large = cfg.mode == ControlMode::Large;
  std::size_t used = 0, bound_better = 0, alpha_better = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    ++used;
    s.mean_none += r.bound_none;
    s.mean_cor1 += r.bound_cor1;
    s.mean_base += r.bound_base;
    s.mean_bound_diff += r.bound_cor1 - r.bound_base;
    bound_better += r.bound_cor1 >= r.bound_base - 1e-9;
    if (large) {
      s.mean_alpha_diff += r.alpha_cor1 - r.alpha_base;
      alpha_better += r.alpha_cor1 >= r.alpha_base;
    } else {
      s.mean_brute += r.bound_brute;
      if (r.bound_brute < r.bound_cor1 - 1e-12 || r.bound_brute < r.bound_base - 1e-12)
        ++s.brute_dominance_violations;
    }
  }
  if (used == 0) return s;
  const auto u = static_cast<double>(used);
  s.mean_none /= u;
  s.mean_cor1 /= u;
  s.mean_base /= u;
  s.mean_bound_diff /= u;
  s.cor1_bound_better_pct = 100.0 * static_cast<double>(bound_better) / u;
  if (large) {
    s.mean_brute = std::nan("");
    s.ratio_cor1 = s.ratio_base = std::nan("");
    s.mean_alpha_diff /= u;
    s.cor1_alpha_better_pct = 100.0 * static_cast<double>(alpha_better) / u;
  } else {
    s.mean_brute /= u;
    s.ratio_cor1 = s.mean_cor1 / s.mean_brute;
    s.ratio_base = s.mean_base / s.mean_brute;
    s.mean_alpha_diff = s.cor1_alpha_better_pct = std::nan("");
  }
  return s;
}

std::string control_trials_csv(const ControlConfig& cfg, const std::vector<ControlRow>& rows) {
  const bool large = cfg.mode == ControlMode::Large;
  std::ostringstream out;
  if (large)
    out << "index,beta_a,beta_b,bound_none,bound_cor1,bound_base,bound_diff,alpha_cor1,"
           "alpha_base,alpha_diff,funded_cor1,funded_base,error\n";
  else
    out << "index,bound_none,bound_cor1,bound_base,bound_brute,ratio_cor1,ratio_base,"
           "funded_cor1,funded_base,funded_brute,error\n";
  for (const auto& r : rows) {
    out << r.index << ',';
    if (large)
      out << format_double(r.beta_a) << ',' << format_double(r.beta_b) << ','
          << format_double(r.bound_none) << ',' << format_double(r.bound_cor1) << ','
          << format_double(r.bound_base) << ',' << format_double(r.bound_cor1 - r.bound_base)
          << ',' << format_double(r.alpha_cor1) << ',' << format_double(r.alpha_base) << ','
          << format_double(r.alpha_cor1 - r.alpha_base) << ',' << r.funded_cor1 << ','
          << r.funded_base << ',';
    else
      out << format_double(r.bound_none) << ',' << format_double(r.bound_cor1) << ','
          << format_double(r.bound_base) << ',' << format_double(r.bound_brute) << ','
          << format_double(r.bound_cor1 / r.bound_brute) << ','
          << format_double(r.bound_base / r.bound_brute) << ',' << r.funded_cor1 << ','
          << r.funded_base << ',' << r.funded_brute << ',';
    out << csv_safe(r.error) << '\n';
  }
  return out.str();
}

std::string control_summary_csv(const ControlSummary& s) {
  std::ostringstream out;
  out << "rows,failed,mean_none,mean_cor1,mean_base,mean_brute,ratio_cor1,ratio_base,"
         "brute_dominance_violations,cor1_bound_better_pct,cor1_alpha_better_pct,"
         "mean_bound_diff,mean_alpha_diff\n"
      << s.rows << ',' << s.failed << ',' << format_double(s.mean_none) << ','
      << format_double(s.mean_cor1) << ',' << format_double(s.mean_base) << ','
      << format_double(s.mean_brute) << ',' << format_double(s.ratio_cor1) << ','
      << format_double(s.ratio_base) << ',' << s.brute_dominance_violations << ','
      << format_double(s.cor1_bound_better_pct) << ',' << format_double(s.cor1_alpha_better_pct)
      << ',' << format_double(s.mean_bound_diff) << ',' << format_double(s.mean_alpha_diff)
      << '\n';
  return out.str();
}

void write_control(const ControlStats& stats, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "trials.csv", control_trials_csv(stats.config, stats.rows));
  write_text_file(dir / "summary.csv", control_summary_csv(stats.summary));
  write_text_file(dir / "config.txt", stats.config.to_text());
}

}  // namespace consensus
