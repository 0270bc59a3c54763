#include "wellclust/gen.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <set>
#include <utility>

#include "wellclust/errors.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {
namespace {

void add_clique(std::vector<Edge>& edges, Vertex first, int size) {
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) edges.push_back({first + i, first + j, 1.0});
  }
}

Instance finish(Vertex n, std::vector<Edge> edges, int k, std::vector<int> assignment,
                nlohmann::json metadata) {
  Instance out;
  out.graph = Graph::from_edges(n, edges);
  out.planted = Partition::from_assignment(out.graph, k, std::move(assignment));
  metadata["vertices"] = n;
  metadata["edges"] = out.graph.num_edges();
  out.metadata = std::move(metadata);
  return out;
}

std::vector<int> block_assignment(int k, int s) {
  std::vector<int> a(static_cast<std::size_t>(k) * s);
  for (std::size_t u = 0; u < a.size(); ++u) a[u] = static_cast<int>(u / s);
  return a;
}

// Visits the indices in [0, total) kept by independent Bernoulli(p) trials,
// jumping over the rejected ones with geometric gaps.
template <typename Visit>
void bernoulli_indices(std::uint64_t total, double p, Rng& rng, Visit visit) {
  if (p <= 0.0 || total == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < total; ++i) visit(i);
    return;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double log_q = std::log1p(-p);
  double pos = -1.0;
  for (;;) {
    const double u = 1.0 - uniform(rng);  // (0, 1]
    pos += std::floor(std::log(u) / log_q) + 1.0;
    if (pos >= static_cast<double>(total)) return;
    visit(static_cast<std::uint64_t>(pos));
  }
}

// Linear index -> (i, j) with j < i over the strict lower triangle.
std::pair<std::uint64_t, std::uint64_t> triangle_pair(std::uint64_t index) {
  auto i = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(index))) / 2.0);
  while (i * (i - 1) / 2 > index) --i;
  while ((i + 1) * i / 2 <= index) ++i;
  return {i, index - i * (i - 1) / 2};
}

}  // namespace

Instance disjoint_cliques(const std::vector<int>& sizes) {
  if (sizes.empty()) throw DomainError("disjoint_cliques needs at least one clique");
  std::vector<Edge> edges;
  std::vector<int> assignment;
  Vertex first = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 2) throw DomainError("clique sizes must be at least 2");
    add_clique(edges, first, sizes[c]);
    assignment.insert(assignment.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
    first += sizes[c];
  }
  nlohmann::json meta{{"family", "disjoint_cliques"}, {"sizes", sizes}};
  return finish(first, std::move(edges), static_cast<int>(sizes.size()), std::move(assignment),
                std::move(meta));
}

Instance disjoint_cliques(int k, int s) {
  if (k < 1) throw DomainError("disjoint_cliques needs k >= 1");
  if (s < 2) throw DomainError("disjoint_cliques needs s >= 2");
  return disjoint_cliques(std::vector<int>(static_cast<std::size_t>(k), s));
}

Instance ring_of_cliques(int k, int s) {
  if (k < 3) throw DomainError("ring_of_cliques needs k >= 3");
  if (s < 3) throw DomainError("ring_of_cliques needs s >= 3");
  std::vector<Edge> edges;
  for (int c = 0; c < k; ++c) add_clique(edges, c * s, s);
  for (int c = 0; c < k; ++c) edges.push_back({c * s, ((c + 1) % k) * s, 1.0});
  nlohmann::json meta{{"family", "ring_of_cliques"}, {"k", k}, {"s", s}};
  return finish(k * s, std::move(edges), k, block_assignment(k, s), std::move(meta));
}

Instance planted_partition(int k, int s, double p, double q, std::uint64_t seed) {
  if (k < 1 || s < 1) throw DomainError("planted_partition needs k >= 1 and s >= 1");
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw DomainError("edge probabilities must lie in [0, 1]");
  }
  if (!(p > q)) throw DomainError("planted_partition needs p > q");
  const double expected_min = (s - 1) * p + static_cast<double>(k - 1) * s * q;
  if (expected_min < 1.0) {
    std::cerr << "warning: expected degree " << expected_min << " is below 1\n";
  }

  Rng rng = make_rng(seed, "planted-partition");
  std::vector<Edge> edges;
  const auto su = static_cast<std::uint64_t>(s);
  for (int c = 0; c < k; ++c) {
    const Vertex base = c * s;
    bernoulli_indices(su * (su - 1) / 2, p, rng, [&](std::uint64_t idx) {
      auto [i, j] = triangle_pair(idx);
      edges.push_back({base + static_cast<Vertex>(j), base + static_cast<Vertex>(i), 1.0});
    });
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      bernoulli_indices(su * su, q, rng, [&](std::uint64_t idx) {
        edges.push_back({a * s + static_cast<Vertex>(idx / su), b * s + static_cast<Vertex>(idx % su), 1.0});
      });
    }
  }

  const Vertex n = k * s;
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  nlohmann::json patched = nlohmann::json::array();
  for (Vertex u = 0; u < n; ++u) {
    if (deg[u] > 0) continue;
    if (s < 2) throw DomainError("isolated vertex in a singleton cluster cannot be patched");
    const Vertex base = (u / s) * s;
    const Vertex partner = base == u ? base + 1 : base;
    edges.push_back({std::min(u, partner), std::max(u, partner), 1.0});
    ++deg[u];
    ++deg[partner];
    patched.push_back({std::min(u, partner), std::max(u, partner)});
  }
  nlohmann::json meta{{"family", "planted_partition"}, {"k", k}, {"s", s}, {"p", p},
                      {"q", q}, {"seed", seed}, {"patched_edges", patched}};
  return finish(n, std::move(edges), k, block_assignment(k, s), std::move(meta));
}

Instance noisy_cliques(int k, int s, int extra_edges, std::uint64_t seed) {
  if (extra_edges < 0) throw DomainError("noisy_cliques needs extra_edges >= 0");
  Instance base = ring_of_cliques(k, s);
  const int hubs = std::max(1, (s + 9) / 10);
  const Vertex n = k * s;
  if (static_cast<long long>(extra_edges) > static_cast<long long>(hubs) * (n - s) - 2) {
    throw DomainError("too many extra edges for the noisy vertex subset");
  }
  std::vector<Edge> edges = base.graph.edges();
  std::set<std::pair<Vertex, Vertex>> present;
  for (const Edge& e : edges) present.insert({e.u, e.v});
  Rng rng = make_rng(seed, "noisy-cliques");
  std::uniform_int_distribution<Vertex> pick_hub(0, hubs - 1);
  std::uniform_int_distribution<Vertex> pick_far(s, n - 1);
  for (int added = 0; added < extra_edges;) {
    const Vertex u = pick_hub(rng);
    const Vertex v = pick_far(rng);
    if (present.insert({u, v}).second) {
      edges.push_back({u, v, 1.0});
      ++added;
    }
  }
  nlohmann::json meta{{"family", "noisy_cliques"}, {"k", k}, {"s", s},
                      {"extra_edges", extra_edges}, {"noisy_vertices", hubs}, {"seed", seed}};
  return finish(n, std::move(edges), k, block_assignment(k, s), std::move(meta));
}

Instance generate(const GenSpec& spec) {
  if (spec.family == "disjoint_cliques") {
    return spec.sizes.empty() ? disjoint_cliques(spec.k, spec.s) : disjoint_cliques(spec.sizes);
  }
  if (spec.family == "ring_of_cliques") return ring_of_cliques(spec.k, spec.s);
  if (spec.family == "planted_partition") return planted_partition(spec.k, spec.s, spec.p, spec.q, spec.seed);
  if (spec.family == "noisy_cliques") return noisy_cliques(spec.k, spec.s, spec.extra_edges, spec.seed);
  throw DomainError("unknown generator family '" + spec.family + "'");
}

nlohmann::json to_json(const GenSpec& spec) {
  nlohmann::json j{{"family", spec.family}, {"k", spec.k}, {"s", spec.s}, {"seed", spec.seed}};
  if (!spec.sizes.empty()) j["sizes"] = spec.sizes;
  if (spec.family == "planted_partition") {
    j["p"] = spec.p;
    j["q"] = spec.q;
  }
  if (spec.family == "noisy_cliques") j["extra_edges"] = spec.extra_edges;
  return j;
}

GenSpec gen_spec_from_json(const nlohmann::json& j) {
  GenSpec spec;
  spec.family = j.value("family", spec.family);
  spec.k = j.value("k", spec.k);
  spec.s = j.value("s", spec.s);
  spec.sizes = j.value("sizes", spec.sizes);
  spec.p = j.value("p", spec.p);
  spec.q = j.value("q", spec.q);
  spec.extra_edges = j.value("extra_edges", spec.extra_edges);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

}  // namespace wellclust
