#include "consensus/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "consensus/errors.hpp"
#include "consensus/rng.hpp"
#include "consensus/textio.hpp"

namespace consensus {

namespace {

using AdjacencyLists = std::vector<std::vector<std::size_t>>;

std::size_t reach_count(const AdjacencyLists& lists, std::vector<char>& seen,
                        std::vector<std::size_t>& stack) {
  std::fill(seen.begin(), seen.end(), 0);
  stack.clear();
  stack.push_back(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : lists[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

// Forward and reverse reachability from node 0.
bool strongly_connected(const AdjacencyLists& fwd, const AdjacencyLists& rev) {
  const auto n = fwd.size();
  if (n == 0) return false;
  std::vector<char> seen(n);
  std::vector<std::size_t> stack;
  stack.reserve(n);
  return reach_count(fwd, seen, stack) == n && reach_count(rev, seen, stack) == n;
}

void erase_one(std::vector<std::size_t>& v, std::size_t value) {
  auto it = std::find(v.begin(), v.end(), value);
  if (it != v.end()) v.erase(it);
}

}  // namespace

Network::Network(std::size_t n, const std::vector<Arc>& arcs)
    : n_(n),
      adjacency_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                       static_cast<Eigen::Index>(n))),
      laplacian_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                       static_cast<Eigen::Index>(n))),
      neighbor_counts_(n, 0),
      out_(n) {
  for (const auto& arc : arcs) {
    if (arc.from >= n || arc.to >= n)
      throw InvariantError("arc index out of range: " + std::to_string(arc.from) +
                           " -> " + std::to_string(arc.to));
    if (arc.from == arc.to && arc.weight != 0.0)
      throw InvariantError("a_ii = 0 violated at agent " + std::to_string(arc.from));
    if (!(arc.weight >= 0.0 && arc.weight <= 1.0))
      throw RangeError("a_ij in [0,1] violated: weight " + format_double(arc.weight) +
                       " on arc " + std::to_string(arc.from) + " -> " +
                       std::to_string(arc.to));
    auto i = static_cast<Eigen::Index>(arc.from);
    auto j = static_cast<Eigen::Index>(arc.to);
    if (adjacency_(i, j) != 0.0)
      throw InvariantError("duplicate arc " + std::to_string(arc.from) + " -> " +
                           std::to_string(arc.to));
    adjacency_(i, j) = arc.weight;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double a = adjacency_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (a > 0.0) {
        out_[i].push_back({i, j, a});
        ++neighbor_counts_[i];
        ++arc_count_;
        row += a;
        laplacian_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -a;
      }
    }
    laplacian_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = row;
  }
}

std::vector<Arc> Network::arcs() const {
  std::vector<Arc> all;
  all.reserve(arc_count_);
  for (const auto& list : out_) all.insert(all.end(), list.begin(), list.end());
  return all;
}

void Network::check_invariants() const {
  if (n_ == 0) throw InvariantError("network must have at least one agent");
  for (std::size_t i = 0; i < n_; ++i)
    if (neighbor_counts_[i] < 1)
      throw InvariantError("n_i >= 1 violated: agent " + std::to_string(i) +
                           " has no neighbours");
  if (!is_strongly_connected(*this))
    throw InvariantError("strong connectivity violated");
}

bool is_strongly_connected(const Network& net) {
  const auto n = net.size();
  AdjacencyLists fwd(n), rev(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& arc : net.out_arcs(i)) {
      fwd[i].push_back(arc.to);
      rev[arc.to].push_back(i);
    }
  return strongly_connected(fwd, rev);
}

bool is_connected(const EdgeList& graph) {
  if (graph.n == 0) return false;
  AdjacencyLists lists(graph.n);
  for (auto [u, v] : graph.edges) {
    lists[u].push_back(v);
    lists[v].push_back(u);
  }
  return strongly_connected(lists, lists);
}

EdgeList generate_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ArgumentError("generate_ba: m must be >= 1");
  if (n < m + 1) throw ArgumentError("generate_ba: need n >= m+1");
  Rng rng(seed);
  EdgeList g;
  g.n = n;
  // Every edge endpoint appears once here, so a uniform pick is a
  // degree-proportional pick.
  std::vector<std::size_t> endpoints;
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = i + 1; j <= m; ++j) {
      g.edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  std::vector<std::size_t> targets;
  for (std::size_t v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      auto t = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    for (auto t : targets) {
      g.edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return g;
}

DirectifyResult directify(const EdgeList& graph, double removal_fraction,
                          std::uint64_t seed) {
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0))
    throw ArgumentError("directify: removal_fraction must lie in [0,1)");
  if (!is_connected(graph)) throw ArgumentError("directify: input graph is not connected");

  const auto n = graph.n;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  arcs.reserve(2 * graph.edges.size());
  AdjacencyLists fwd(n), rev(n);
  for (auto [u, v] : graph.edges) {
    if (u == v || u >= n || v >= n) throw ArgumentError("directify: bad edge");
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
    fwd[u].push_back(v);
    fwd[v].push_back(u);
    rev[v].push_back(u);
    rev[u].push_back(v);
  }

  DirectifyResult result;
  result.arcs_total = arcs.size();
  result.arcs_requested = static_cast<std::size_t>(
      std::floor(removal_fraction * static_cast<double>(arcs.size())));

  Rng rng(seed);
  std::vector<std::size_t> order(arcs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<char> removed(arcs.size(), 0);
  for (auto k : order) {
    if (result.arcs_removed >= result.arcs_requested) break;
    auto [u, v] = arcs[k];
    erase_one(fwd[u], v);
    erase_one(rev[v], u);
    if (strongly_connected(fwd, rev)) {
      removed[k] = 1;
      ++result.arcs_removed;
    } else {
      fwd[u].push_back(v);
      rev[v].push_back(u);
    }
  }

  std::vector<Arc> kept;
  kept.reserve(arcs.size() - result.arcs_removed);
  for (std::size_t k = 0; k < arcs.size(); ++k)
    if (!removed[k]) kept.push_back({arcs[k].first, arcs[k].second, 1.0});
  result.network = Network(n, kept);
  result.network.check_invariants();
  return result;
}

DirectifyResult generate_directed_ba(std::size_t n, std::size_t m,
                                     double removal_fraction, std::uint64_t seed) {
  return directify(generate_ba(n, m, derive_seed(seed, 1)), removal_fraction,
                   derive_seed(seed, 2));
}

Network parse_network(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Arc> arcs;
  while (std::getline(lines, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream tokens{std::string(t)};
    std::vector<std::string> parts;
    for (std::string tok; tokens >> tok;) parts.push_back(tok);
    if (!have_header) {
      if (parts.size() != 2 || parts[0] != "n" || !parse_size(parts[1], n))
        throw ParseError("expected header 'n <count>'", lineno);
      have_header = true;
      continue;
    }
    Arc arc{};
    if (parts.size() != 3 || !parse_size(parts[0], arc.from) ||
        !parse_size(parts[1], arc.to) || !parse_double(parts[2], arc.weight))
      throw ParseError("expected 'i j w'", lineno);
    if (arc.from >= n || arc.to >= n) throw ParseError("agent index out of range", lineno);
    if (arc.weight == 0.0 && arc.from != arc.to) continue;
    arcs.push_back(arc);
  }
  if (!have_header) throw ParseError("missing header 'n <count>'", lineno);
  Network net(n, arcs);
  net.check_invariants();
  return net;
}

std::string format_network(const Network& net) {
  std::string out = "n " + std::to_string(net.size()) + "\n";
  for (std::size_t i = 0; i < net.size(); ++i)
    for (const auto& arc : net.out_arcs(i))
      out += std::to_string(arc.from) + " " + std::to_string(arc.to) + " " +
             format_double(arc.weight) + "\n";
  return out;
}

Network load_network(const std::filesystem::path& path) {
  return parse_network(read_text_file(path));
}

void save_network(const Network& net, const std::filesystem::path& path) {
  write_text_file(path, format_network(net));
}

}  // namespace consensus
