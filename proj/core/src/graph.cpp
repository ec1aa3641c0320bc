#include "hkgame/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hkgame/errors.hpp"

namespace hkgame {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

void check_agent(const SocialGraph& g, int i) {
  if (i < 0 || i >= g.size()) {
    throw std::out_of_range("agent index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(g.size()) + ")");
  }
}

bool parse_int(std::string_view token, long long& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

SocialGraph::SocialGraph(int n, std::vector<Edge> edges) : n_(n), neighbors_(n > 0 ? n : 0) {
  if (n <= 0) throw GraphError("graph must have at least one agent");
  std::set<Edge> seen;
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw GraphError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references an agent outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) throw GraphError("self-loop at agent " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) {
      throw GraphError("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (int i = 0; i < n; ++i) {
    if (neighbors_[i].empty()) throw GraphError("agent " + std::to_string(i) + " is isolated");
    std::sort(neighbors_[i].begin(), neighbors_[i].end());
  }
  DisjointSets components(n);
  for (const auto& [a, b] : edges) components.unite(a, b);
  const int root = components.find(0);
  for (int i = 1; i < n; ++i) {
    if (components.find(i) != root) throw GraphError("graph is disconnected");
  }
  std::sort(edges.begin(), edges.end());
  edges_ = std::move(edges);
}

const std::vector<int>& SocialGraph::neighbors(int i) const {
  check_agent(*this, i);
  return neighbors_[i];
}

bool SocialGraph::adjacent(int i, int j) const {
  const auto& ni = neighbors(i);
  return std::binary_search(ni.begin(), ni.end(), j);
}

SocialGraph load_edge_list(std::string_view text, Indexing indexing) {
  const long long offset = indexing == Indexing::kOneBased ? 1 : 0;
  std::vector<Edge> edges;
  long long max_index = -1;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected two agent indices, found " +
                                    std::to_string(tokens.size()) + " fields");
    }
    long long ends[2];
    for (int k = 0; k < 2; ++k) {
      if (!parse_int(tokens[k], ends[k])) {
        throw ParseError(line_no, "'" + tokens[k] + "' is not an integer");
      }
      ends[k] -= offset;
      if (ends[k] < 0) {
        throw ParseError(line_no, "agent index " + tokens[k] + " below the first valid label");
      }
      if (ends[k] > 1'000'000) throw ParseError(line_no, "agent index " + tokens[k] + " too large");
      max_index = std::max(max_index, ends[k]);
    }
    edges.emplace_back(static_cast<int>(ends[0]), static_cast<int>(ends[1]));
  }
  if (edges.empty()) throw ParseError(line_no, "edge list contains no edges");
  return SocialGraph(static_cast<int>(max_index + 1), std::move(edges));
}

SocialGraph load_edge_list_file(const std::filesystem::path& path, Indexing indexing) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_edge_list(buffer.str(), indexing);
}

SocialGraph zachary_karate_club() {
  static const SocialGraph graph = load_edge_list(zachary_karate_club_text(), Indexing::kOneBased);
  return graph;
}

Eigen::MatrixXd adjacency_matrix(const SocialGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (const auto& [i, j] : g.edges()) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

Eigen::VectorXd degrees(const SocialGraph& g) {
  Eigen::VectorXd d(g.size());
  for (int i = 0; i < g.size(); ++i) d(i) = g.degree(i);
  return d;
}

Eigen::MatrixXd degree_matrix(const SocialGraph& g) { return degrees(g).asDiagonal(); }

Eigen::MatrixXd agent_laplacian(const SocialGraph& g, int i) {
  check_agent(g, i);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (int j : g.neighbors(i)) {
    l(i, i) += 1.0;
    l(j, j) += 1.0;
    l(i, j) -= 1.0;
    l(j, i) -= 1.0;
  }
  return l;
}

Eigen::MatrixXd global_laplacian(const SocialGraph& g) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (int i = 0; i < g.size(); ++i) l += agent_laplacian(g, i);
  return l;
}

Eigen::MatrixXd dynamics_matrix(const SocialGraph& g) {
  const int n = g.size();
  Eigen::MatrixXd m = -Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& ni = g.neighbors(i);
    if (ni.empty()) throw GraphError("agent " + std::to_string(i) + " is isolated");
    const double w = 1.0 / static_cast<double>(ni.size());
    for (int j : ni) m(i, j) += w;
  }
  return m;
}

GraphMatrices build_graph_matrices(const SocialGraph& g) {
  GraphMatrices m;
  m.adjacency = adjacency_matrix(g);
  m.degree = degree_matrix(g);
  m.agent_laplacians.reserve(g.size());
  m.global_laplacian = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (int i = 0; i < g.size(); ++i) {
    m.agent_laplacians.push_back(agent_laplacian(g, i));
    m.global_laplacian += m.agent_laplacians.back();
  }
  m.dynamics = dynamics_matrix(g);
  return m;
}

}  // namespace hkgame
