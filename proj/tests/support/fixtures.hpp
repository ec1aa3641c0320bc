#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hkgame/dynamics.hpp"
#include "hkgame/graph.hpp"
#include "hkgame/random.hpp"

namespace hkgame::testing {

inline SocialGraph k2() { return SocialGraph(2, {{0, 1}}); }
inline SocialGraph p3() { return SocialGraph(3, {{0, 1}, {1, 2}}); }

inline SocialGraph cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return SocialGraph(n, edges);
}

/// Random spanning tree plus extra edges with probability `density`.
inline SocialGraph random_connected_graph(int n, PortableRng& rng, double density = 0.3) {
  std::set<Edge> edges;
  for (int i = 1; i < n; ++i) {
    const int parent = std::min(i - 1, static_cast<int>(rng.uniform() * i));
    edges.insert({parent, i});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < density) edges.insert({i, j});
    }
  }
  return SocialGraph(n, std::vector<Edge>(edges.begin(), edges.end()));
}

inline Eigen::VectorXd random_vector(int n, PortableRng& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-scale, scale);
  return v;
}

/// K2 with x0 = (1, -1) over [0, 1], r = b = 1.
inline GameConfig k2_config(int samples = kDefaultSamples) {
  return GameConfig::uniform(k2(), 1.0, 1.0, 1.0, Eigen::Vector2d(1.0, -1.0), samples);
}

inline constexpr std::uint64_t kZacharySeed = 2023;

/// The Zachary experiment: t_f = 10, b = 1, two-cluster x0.
inline GameConfig zachary_config(double r = 1.0, double horizon = 10.0) {
  auto g = zachary_karate_club();
  return GameConfig::uniform(g, horizon, r, 1.0, two_cluster_opinions(g.size(), kZacharySeed));
}

}  // namespace hkgame::testing
