#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace wellclust {

using Vertex = int;

/// Sorted list of distinct vertex ids.
using VertexSet = std::vector<Vertex>;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;
};

/// Undirected weighted graph in compressed adjacency form.
///
/// Immutable after construction. Neighbor lists are sorted by vertex id and
/// every vertex has positive degree, so D^{-1/2} is always defined.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on vertices [0, n). Rejects self-loops, non-positive
  /// weights, duplicate edges (in either orientation), out-of-range ids and
  /// isolated vertices with DomainError.
  static Graph from_edges(Vertex n, std::span<const Edge> edges);

  Vertex num_vertices() const noexcept { return static_cast<Vertex>(degrees_.size()); }
  std::size_t num_edges() const noexcept { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex u) const noexcept {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::span<const double> weights(Vertex u) const noexcept {
    return {weights_.data() + offsets_[u], weights_.data() + offsets_[u + 1]};
  }

  double degree(Vertex u) const noexcept { return degrees_[u]; }
  const std::vector<double>& degrees() const noexcept { return degrees_; }
  double inv_sqrt_degree(Vertex u) const noexcept { return inv_sqrt_degrees_[u]; }
  double total_volume() const noexcept { return total_volume_; }

  /// True when every edge has weight exactly 1.
  bool unweighted() const noexcept { return unweighted_; }

  /// Edges with u < v, ordered by (u, v).
  std::vector<Edge> edges() const;

  /// Weight of edge {u, v}, or 0 if absent.
  double edge_weight(Vertex u, Vertex v) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> targets_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  std::vector<double> inv_sqrt_degrees_;
  double total_volume_ = 0.0;
  bool unweighted_ = true;
};

/// Disjoint k-way cluster assignment. Cluster ids are 0-based. Clusters may be
/// empty; operations that need nonempty clusters check for it.
class Partition {
 public:
  Partition() = default;

  static Partition from_assignment(const Graph& g, int k, std::vector<int> assignment);

  int k() const noexcept { return k_; }
  Vertex num_vertices() const noexcept { return static_cast<Vertex>(assignment_.size()); }
  int cluster_of(Vertex u) const noexcept { return assignment_[u]; }
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  double cluster_volume(int i) const noexcept { return volumes_[i]; }
  const std::vector<double>& cluster_volumes() const noexcept { return volumes_; }
  std::size_t cluster_size(int i) const noexcept { return sizes_[i]; }

  /// Members of cluster i, sorted.
  VertexSet members(int i) const;
  std::vector<VertexSet> clusters() const;

  bool has_empty_cluster() const noexcept;
  /// Throws DomainError naming the first empty cluster.
  void require_nonempty() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.k_ == b.k_ && a.assignment_ == b.assignment_;
  }

 private:
  int k_ = 0;
  std::vector<int> assignment_;
  std::vector<double> volumes_;
  std::vector<std::size_t> sizes_;
};

/// Sorts and deduplicates; throws DomainError on out-of-range ids.
VertexSet make_vertex_set(const Graph& g, std::vector<Vertex> vertices);

double volume(const Graph& g, std::span<const Vertex> s);

/// Total weight of edges with exactly one endpoint in s (s must be sorted).
double boundary_weight(const Graph& g, std::span<const Vertex> s);

/// |E(S, V\S)| / vol(S), with no min over the two sides.
double conductance(const Graph& g, std::span<const Vertex> s);

/// max_i conductance(A_i) over the clusters of p.
double partition_max_conductance(const Graph& g, const Partition& p);

/// Conductance of every cluster of p, in cluster order.
std::vector<double> cluster_conductances(const Graph& g, const Partition& p);

/// Degree-weighted Rayleigh quotient
///   sum_{(u,v) in E} w_uv (f(u) - f(v))^2 / sum_u d_u f(u)^2.
double rayleigh_quotient(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& f);

/// x^T L x / ||x||^2 for the normalized Laplacian L. Equals
/// rayleigh_quotient(g, D^{-1/2} x).
double normalized_rayleigh_quotient(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x);

/// y = x - D^{-1/2} A D^{-1/2} x.
Eigen::VectorXd normalized_laplacian_apply(const Graph& g,
                                           const Eigen::Ref<const Eigen::VectorXd>& x);
void normalized_laplacian_apply(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x,
                                Eigen::Ref<Eigen::VectorXd> y);

/// vol((A\B) u (B\A)). Inputs must be sorted.
double symmetric_difference_volume(const Graph& g, std::span<const Vertex> a,
                                   std::span<const Vertex> b);

/// Connected component id per vertex, numbered by smallest member.
std::vector<int> connected_components(const Graph& g, int* count = nullptr);

}  // namespace wellclust
