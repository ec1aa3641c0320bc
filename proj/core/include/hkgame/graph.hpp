#pragma once

#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hkgame {

/// Zero-based agent pair; stored with first < second.
using Edge = std::pair<int, int>;

enum class Indexing { kZeroBased, kOneBased };

/// Undirected, simple, connected social graph on agents 0..n-1.
///
/// Construction validates every invariant, so a SocialGraph value is always
/// usable by the dynamics and solvers: no self-loops, no duplicate edges, a
/// single component, and every agent has at least one neighbor.
class SocialGraph {
 public:
  /// Throws GraphError on self-loops, duplicates, out-of-range endpoints,
  /// isolated agents or more than one component.
  SocialGraph(int n, std::vector<Edge> edges);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const;
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  bool adjacent(int i, int j) const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

/// Parses a whitespace-separated edge list. Lines whose first non-blank
/// character is '#' and blank lines are skipped. The agent count is the
/// largest index seen (after conversion to zero-based, plus one).
SocialGraph load_edge_list(std::string_view text, Indexing indexing);
SocialGraph load_edge_list_file(const std::filesystem::path& path, Indexing indexing);

/// The bundled 34-member, 78-tie Zachary karate club network.
SocialGraph zachary_karate_club();
/// Raw one-based edge-list text of the bundled dataset.
std::string_view zachary_karate_club_text();

/// Dense matrices derived from a graph.
struct GraphMatrices {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd degree;
  std::vector<Eigen::MatrixXd> agent_laplacians;
  Eigen::MatrixXd global_laplacian;
  Eigen::MatrixXd dynamics;
};

Eigen::MatrixXd adjacency_matrix(const SocialGraph& g);
Eigen::MatrixXd degree_matrix(const SocialGraph& g);

/// Laplacian of the star subgraph formed by the edges incident to agent i,
/// so that x^T L_i x = sum_{j in N_i} (x_i - x_j)^2.
Eigen::MatrixXd agent_laplacian(const SocialGraph& g, int i);

/// Sum of all agent Laplacians (twice the ordinary graph Laplacian).
Eigen::MatrixXd global_laplacian(const SocialGraph& g);

/// D^{-1} A - I: generator of the uncontrolled continuous HK flow.
Eigen::MatrixXd dynamics_matrix(const SocialGraph& g);

GraphMatrices build_graph_matrices(const SocialGraph& g);

/// Degree vector |N_i| as doubles.
Eigen::VectorXd degrees(const SocialGraph& g);

}  // namespace hkgame
