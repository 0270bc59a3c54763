#include "wellclust/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wellclust/errors.hpp"

namespace wellclust {

Graph Graph::from_edges(Vertex n, std::span<const Edge> edges) {
  if (n <= 0) throw DomainError("graph must have at least one vertex");

  std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw DomainError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                        ") out of range for n = " + std::to_string(n));
    }
    if (e.u == e.v) throw DomainError("self-loop at vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw DomainError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                        ") has non-positive weight");
    }
    ++counts[e.u];
    ++counts[e.v];
  }

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Vertex u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + counts[u];
  g.targets_.resize(g.offsets_.back());
  g.weights_.resize(g.offsets_.back());

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : edges) {
    g.targets_[cursor[e.u]] = e.v;
    g.weights_[cursor[e.u]++] = e.weight;
    g.targets_[cursor[e.v]] = e.u;
    g.weights_[cursor[e.v]++] = e.weight;
  }

  g.degrees_.assign(static_cast<std::size_t>(n), 0.0);
  g.inv_sqrt_degrees_.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::size_t> order;
  for (Vertex u = 0; u < n; ++u) {
    const std::size_t begin = g.offsets_[u];
    const std::size_t end = g.offsets_[u + 1];
    if (begin == end) throw DomainError("vertex " + std::to_string(u) + " is isolated");

    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.targets_[a] < g.targets_[b]; });
    std::vector<Vertex> t(order.size());
    std::vector<double> w(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      t[i] = g.targets_[order[i]];
      w[i] = g.weights_[order[i]];
      if (i > 0 && t[i] == t[i - 1]) {
        throw DomainError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(t[i]) +
                          ")");
      }
    }
    std::copy(t.begin(), t.end(), g.targets_.begin() + static_cast<std::ptrdiff_t>(begin));
    std::copy(w.begin(), w.end(), g.weights_.begin() + static_cast<std::ptrdiff_t>(begin));

    double d = 0.0;
    for (double x : w) {
      d += x;
      if (x != 1.0) g.unweighted_ = false;
    }
    g.degrees_[u] = d;
    g.inv_sqrt_degrees_[u] = 1.0 / std::sqrt(d);
    g.total_volume_ += d;
  }
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex u = 0; u < num_vertices(); ++u) {
    auto nb = neighbors(u);
    auto w = weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (u < nb[i]) out.push_back({u, nb[i], w[i]});
    }
  }
  return out;
}

double Graph::edge_weight(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return 0.0;
  return weights(u)[static_cast<std::size_t>(it - nb.begin())];
}

Partition Partition::from_assignment(const Graph& g, int k, std::vector<int> assignment) {
  if (k < 1) throw DomainError("partition needs k >= 1");
  if (assignment.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw DomainError("assignment has " + std::to_string(assignment.size()) +
                      " entries, graph has " + std::to_string(g.num_vertices()) + " vertices");
  }
  Partition p;
  p.k_ = k;
  p.volumes_.assign(static_cast<std::size_t>(k), 0.0);
  p.sizes_.assign(static_cast<std::size_t>(k), 0);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    const int c = assignment[u];
    if (c < 0 || c >= k) {
      throw DomainError("vertex " + std::to_string(u) + " has cluster " + std::to_string(c) +
                        " outside [0, " + std::to_string(k) + ")");
    }
    p.volumes_[c] += g.degree(u);
    ++p.sizes_[c];
  }
  p.assignment_ = std::move(assignment);
  return p;
}

VertexSet Partition::members(int i) const {
  VertexSet out;
  out.reserve(sizes_[i]);
  for (Vertex u = 0; u < num_vertices(); ++u) {
    if (assignment_[u] == i) out.push_back(u);
  }
  return out;
}

std::vector<VertexSet> Partition::clusters() const {
  std::vector<VertexSet> out(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) out[i].reserve(sizes_[i]);
  for (Vertex u = 0; u < num_vertices(); ++u) out[assignment_[u]].push_back(u);
  return out;
}

bool Partition::has_empty_cluster() const noexcept {
  return std::find(sizes_.begin(), sizes_.end(), std::size_t{0}) != sizes_.end();
}

void Partition::require_nonempty() const {
  for (int i = 0; i < k_; ++i) {
    if (sizes_[i] == 0) throw DomainError("cluster " + std::to_string(i) + " is empty");
  }
}

VertexSet make_vertex_set(const Graph& g, std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (!vertices.empty() && (vertices.front() < 0 || vertices.back() >= g.num_vertices())) {
    throw DomainError("vertex set contains an out-of-range id");
  }
  return vertices;
}

double volume(const Graph& g, std::span<const Vertex> s) {
  double vol = 0.0;
  for (Vertex u : s) vol += g.degree(u);
  return vol;
}

double boundary_weight(const Graph& g, std::span<const Vertex> s) {
  double cut = 0.0;
  for (Vertex u : s) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (!std::binary_search(s.begin(), s.end(), nb[i])) cut += w[i];
    }
  }
  return cut;
}

double conductance(const Graph& g, std::span<const Vertex> s) {
  if (s.empty()) throw DomainError("conductance of the empty set is undefined");
  if (s.size() >= static_cast<std::size_t>(g.num_vertices())) {
    throw DomainError("conductance of the full vertex set is undefined");
  }
  return boundary_weight(g, s) / volume(g, s);
}

std::vector<double> cluster_conductances(const Graph& g, const Partition& p) {
  p.require_nonempty();
  std::vector<double> cut(static_cast<std::size_t>(p.k()), 0.0);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    const int cu = p.cluster_of(u);
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (p.cluster_of(nb[i]) != cu) cut[cu] += w[i];
    }
  }
  std::vector<double> out(cut.size());
  for (int i = 0; i < p.k(); ++i) out[i] = cut[i] / p.cluster_volume(i);
  return out;
}

double partition_max_conductance(const Graph& g, const Partition& p) {
  auto phi = cluster_conductances(g, p);
  return *std::max_element(phi.begin(), phi.end());
}

double rayleigh_quotient(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& f) {
  double num = 0.0;
  double den = 0.0;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    den += g.degree(u) * f[u] * f[u];
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (u < nb[i]) {
        const double diff = f[u] - f[nb[i]];
        num += w[i] * diff * diff;
      }
    }
  }
  if (den == 0.0) throw DomainError("Rayleigh quotient of the zero vector");
  return num / den;
}

double normalized_rayleigh_quotient(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double nrm2 = x.squaredNorm();
  if (nrm2 == 0.0) throw DomainError("Rayleigh quotient of the zero vector");
  return x.dot(normalized_laplacian_apply(g, x)) / nrm2;
}

void normalized_laplacian_apply(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x,
                                Eigen::Ref<Eigen::VectorXd> y) {
  if (x.size() != g.num_vertices() || y.size() != g.num_vertices()) {
    throw DomainError("vector length does not match vertex count");
  }
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) acc += w[i] * g.inv_sqrt_degree(nb[i]) * x[nb[i]];
    y[u] = x[u] - g.inv_sqrt_degree(u) * acc;
  }
}

Eigen::VectorXd normalized_laplacian_apply(const Graph& g,
                                           const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd y(g.num_vertices());
  normalized_laplacian_apply(g, x, y);
  return y;
}

double symmetric_difference_volume(const Graph& g, std::span<const Vertex> a,
                                   std::span<const Vertex> b) {
  double vol = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      vol += g.degree(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      vol += g.degree(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  return vol;
}

std::vector<int> connected_components(const Graph& g, int* count) {
  const Vertex n = g.num_vertices();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> stack;
  int next = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count != nullptr) *count = next;
  return comp;
}

}  // namespace wellclust
