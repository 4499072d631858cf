#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace consensus {

/// A directed arc i -> j with weight a_ij: agent i listens to agent j.
struct Arc {
  std::size_t from;
  std::size_t to;
  double weight;
};

/// Undirected simple graph on nodes 0..n-1, as produced by the generators.
struct EdgeList {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Directed weighted interaction network.
///
/// Holds the dense adjacency a_ij in [0,1] with a zero diagonal, the
/// Laplacian (l_ij = -a_ij off the diagonal, row sums zero) and the number of
/// out-neighbours n_i of every agent. A sparse copy of the arcs is kept for
/// the simulation loops. Construction checks the local invariants (indices,
/// zero diagonal, weight range); neighbour counts and strong connectivity are
/// checked by check_invariants() since some callers need to reason about
/// networks that violate them.
class Network {
 public:
  Network() = default;
  Network(std::size_t n, const std::vector<Arc>& arcs);

  std::size_t size() const noexcept { return n_; }
  const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
  const Eigen::MatrixXd& laplacian() const noexcept { return laplacian_; }
  const std::vector<int>& neighbor_counts() const noexcept { return neighbor_counts_; }
  double weight(std::size_t i, std::size_t j) const { return adjacency_(i, j); }

  /// Outgoing arcs of agent i (neighbours it listens to), sorted by target.
  const std::vector<Arc>& out_arcs(std::size_t i) const { return out_[i]; }
  std::vector<Arc> arcs() const;
  std::size_t arc_count() const noexcept { return arc_count_; }

  /// Throws InvariantError naming the first violated invariant: every agent
  /// has at least one neighbour, and the graph is strongly connected.
  void check_invariants() const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.n_ == b.n_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t arc_count_ = 0;
  Eigen::MatrixXd adjacency_;
  Eigen::MatrixXd laplacian_;
  std::vector<int> neighbor_counts_;
  std::vector<std::vector<Arc>> out_;
};

/// Barabasi-Albert preferential attachment. Starts from a clique on m+1
/// nodes; every later node attaches to m distinct existing nodes chosen with
/// probability proportional to degree.
EdgeList generate_ba(std::size_t n, std::size_t m, std::uint64_t seed);

struct DirectifyResult {
  Network network;
  std::size_t arcs_total = 0;      ///< arcs before removal (2 per edge)
  std::size_t arcs_requested = 0;  ///< floor(removal_fraction * arcs_total)
  std::size_t arcs_removed = 0;    ///< may fall short of the request

  double realized_fraction() const {
    return arcs_total == 0 ? 0.0
                           : static_cast<double>(arcs_removed) /
                                 static_cast<double>(arcs_total);
  }
};

/// Turns every undirected edge into two unit arcs, then removes arcs in a
/// seeded random order, skipping any removal that would break strong
/// connectivity, until floor(removal_fraction * arcs) are gone or the
/// candidates run out.
DirectifyResult directify(const EdgeList& graph, double removal_fraction,
                          std::uint64_t seed);

/// generate_ba followed by directify, both seeded from `seed`.
DirectifyResult generate_directed_ba(std::size_t n, std::size_t m,
                                     double removal_fraction, std::uint64_t seed);

bool is_strongly_connected(const Network& net);
bool is_connected(const EdgeList& graph);

// Edge-list text format: "n <count>" then one "i j w" line per arc.
Network parse_network(const std::string& text);
std::string format_network(const Network& net);
Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace consensus
