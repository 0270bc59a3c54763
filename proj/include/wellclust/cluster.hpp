#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wellclust/graph.hpp"
#include "wellclust/heat_kernel.hpp"
#include "wellclust/spectral.hpp"

namespace wellclust {

/// Points with per-point weights (vertex u carries weight d_u instead of
/// being replicated d_u times).
struct WeightedPointSet {
  Eigen::MatrixXd points;  ///< n x dim
  std::vector<double> weights;

  /// Validates sizes, finiteness and positive weights.
  static WeightedPointSet make(Eigen::MatrixXd points, std::vector<double> weights);
  static WeightedPointSet from_embedding(const Graph& g, const SpectralEmbedding& emb);
  static WeightedPointSet from_sketch(const Graph& g, const HeatKernelSketch& sketch);

  int size() const noexcept { return static_cast<int>(points.rows()); }
  int dim() const noexcept { return static_cast<int>(points.cols()); }
};

struct Centers {
  Eigen::MatrixXd positions;           ///< k x dim
  std::vector<Vertex> origin_vertices;  ///< sampled point ids, empty for centroids

  int k() const noexcept { return static_cast<int>(positions.rows()); }
};

/// Sum of w_u ||x(u) - mu_i||^2 with mu_i the weighted centroid of cluster i.
/// Throws DomainError on an empty cluster or a label outside [0, k).
double cost(const WeightedPointSet& ps, std::span<const int> labels, int k);
double cost(const WeightedPointSet& ps, const Partition& p);

/// Sum of w_u ||x(u) - c_{label(u)}||^2 for fixed centers.
double assignment_cost(const WeightedPointSet& ps, std::span<const int> labels,
                       const Eigen::MatrixXd& centers);

/// Weighted centroids; empty clusters are an error.
Eigen::MatrixXd weighted_centroids(const WeightedPointSet& ps, std::span<const int> labels, int k);

struct KMeansOptions {
  int n_init = 10;
  int max_iterations = 100;
  double rel_tol = 1e-6;
  /// Known lower bound on the optimal cost; enables KMeansResult::apt_estimate.
  std::optional<double> cost_lower_bound;
};

struct KMeansResult {
  std::vector<int> labels;
  Centers centers;  ///< weighted centroids of the final clusters
  double cost = 0.0;
  int iterations = 0;
  std::vector<double> cost_history;  ///< seeding cost first, then one entry per Lloyd step
  std::optional<double> apt_estimate;

  int k() const noexcept { return centers.k(); }
  Partition partition(const Graph& g) const { return Partition::from_assignment(g, k(), labels); }
};

/// D^2-weighted seeding followed by weighted Lloyd iterations, best of
/// n_init restarts. Throws DomainError when k < 1 or k > n.
KMeansResult kmeans(const WeightedPointSet& ps, int k, std::uint64_t seed,
                    const KMeansOptions& opts = {});

struct SeedAndTrimOptions {
  double c_N = 200.0;
};

/// N = ceil(c_N k ln(k + 1)), or ceil(c_N) when k = 1.
int seed_sample_count(int k, double c_N = 200.0);

/// Samples N points proportionally to w_u ||x(u)||^2, then for i = 2..N drops
/// every surviving earlier sample j with ||x_i - x_j||^2 < ||x_i||^2 / (10^4 k).
/// Returns the first k survivors (in sampling order). Throws SeedingFailure
/// when fewer than k survive. `survivors`, when given, receives the count.
Centers seed_and_trim(const WeightedPointSet& ps, int k, std::uint64_t seed,
                      const SeedAndTrimOptions& opts = {}, int* survivors = nullptr);

enum class GroupingMode { exact, lsh };

/// Label of each point: a center within (1 + eps) of its nearest center
/// (exact nearest when mode is exact). Ties go to the lower center index.
std::vector<int> group_by_nearest(const WeightedPointSet& ps, const Centers& centers, double eps,
                                  GroupingMode mode, std::uint64_t seed = 0);

/// max(0, ln k - 1).
double grouping_epsilon(int k);

/// Sum of cluster conductances; +inf when a cluster is empty.
double partition_score(const Graph& g, const Partition& p);

struct SpectralPipelineOptions {
  EigenSolverOptions eig;
  KMeansOptions kmeans;
};

struct SpectralPipelineResult {
  Partition partition;
  KMeansResult kmeans;
  EigenPairs eig;
};

/// bottom_eigenpairs -> spectral_embed -> kmeans.
SpectralPipelineResult spectral_cluster_pipeline(const Graph& g, int k, std::uint64_t seed,
                                                 const SpectralPipelineOptions& opts = {});

struct FastPipelineOptions {
  double epsilon = 0.45;
  std::optional<double> delta;  ///< default epsilon * n^-c_delta
  double c_delta = 3.0;
  double jl_constant = 4.0;
  double t_min = 2.0;
  double t_max = 0.0;  ///< 0 means n^3
  int seeding_attempts = 3;
  GroupingMode grouping = GroupingMode::lsh;
  SeedAndTrimOptions seeding;
  ExpmOptions expm;
};

/// t_min * 2^i for i = 0..L-1 with L = ceil(log2(t_max / t_min)) + 1.
std::vector<double> temperature_schedule(double t_min, double t_max);

struct TemperatureDiagnostics {
  double t = 0.0;
  std::string status;  ///< "ok" or "seeding_failure"
  int attempts = 0;
  int survivors = 0;
  double score = std::numeric_limits<double>::infinity();
  double raw_cost = std::numeric_limits<double>::quiet_NaN();
  int sketch_dim = 0;
  int krylov_steps = 0;
};

struct FastPipelineResult {
  Partition partition;
  double best_t = 0.0;
  double score = 0.0;
  double raw_cost = 0.0;
  Centers centers;
  std::vector<TemperatureDiagnostics> per_t;
};

/// Temperature doubling: at each t build the heat-kernel sketch, run
/// seed_and_trim (up to seeding_attempts seeds) and group points by nearest
/// center. Candidates are ranked by partition_score; on ties the later
/// temperature wins. Throws PipelineError when no temperature yields centers.
FastPipelineResult fast_cluster_pipeline(const Graph& g, int k, std::uint64_t seed,
                                         const FastPipelineOptions& opts = {});

}  // namespace wellclust
