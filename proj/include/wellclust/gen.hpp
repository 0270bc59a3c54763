#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellclust/graph.hpp"

namespace wellclust {

/// A generated graph with its planted partition.
struct Instance {
  Graph graph;
  Partition planted;
  nlohmann::json metadata;
};

/// k copies of K_s (s >= 2), clique c on vertices [c s, (c+1) s).
Instance disjoint_cliques(int k, int s);
/// One clique per entry of sizes (each >= 2).
Instance disjoint_cliques(const std::vector<int>& sizes);

/// k cliques K_s in a cycle; clique c is joined to clique c+1 (mod k) by the
/// edge between their first vertices. Needs k >= 3, s >= 3.
Instance ring_of_cliques(int k, int s);

/// k clusters of s vertices, intra-cluster edges with probability p and
/// inter-cluster edges with probability q (p > q). An isolated vertex gets one
/// edge to the lowest-index other vertex of its cluster; such edges are listed
/// in metadata["patched_edges"].
Instance planted_partition(int k, int s, double p, double q, std::uint64_t seed);

/// ring_of_cliques(k, s) plus extra_edges distinct random edges from the first
/// ceil(s / 10) vertices of clique 0 to vertices outside clique 0.
Instance noisy_cliques(int k, int s, int extra_edges, std::uint64_t seed);

struct GenSpec {
  std::string family = "ring_of_cliques";
  int k = 4;
  int s = 16;
  std::vector<int> sizes;  ///< disjoint_cliques only; overrides k and s when set
  double p = 0.5;
  double q = 0.005;
  int extra_edges = 0;
  std::uint64_t seed = 0;
};

/// Dispatches on spec.family. Throws DomainError on an unknown family or bad
/// parameters.
Instance generate(const GenSpec& spec);

nlohmann::json to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const nlohmann::json& j);

}  // namespace wellclust
