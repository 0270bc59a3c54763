#include "wellclust/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wellclust/errors.hpp"
#include "wellclust/lsh.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {
namespace {

void check_labels(const WeightedPointSet& ps, std::span<const int> labels, int k) {
  if (labels.size() != static_cast<std::size_t>(ps.size())) {
    throw DomainError("label count does not match point count");
  }
  for (int c : labels) {
    if (c < 0 || c >= k) throw DomainError("label " + std::to_string(c) + " outside [0, k)");
  }
}

// Exact nearest center for every point (lowest index on ties).
void assign(const WeightedPointSet& ps, const Eigen::MatrixXd& centers, std::vector<int>& labels) {
  for (int u = 0; u < ps.size(); ++u) labels[u] = nearest_center(centers, ps.points.row(u));
}

// Moves the point with the largest weighted error into each empty cluster.
void fill_empty(const WeightedPointSet& ps, const Eigen::MatrixXd& centers, std::vector<int>& labels,
                int k) {
  for (;;) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int c : labels) ++sizes[c];
    const auto empty = std::find(sizes.begin(), sizes.end(), 0);
    if (empty == sizes.end()) return;
    int far = -1;
    double far_d = -1.0;
    for (int u = 0; u < ps.size(); ++u) {
      if (sizes[labels[u]] < 2) continue;
      const double d = ps.weights[u] * (ps.points.row(u) - centers.row(labels[u])).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = u;
      }
    }
    if (far < 0) return;  // fewer points than clusters; cannot happen for k <= n
    labels[far] = static_cast<int>(empty - sizes.begin());
  }
}

Eigen::MatrixXd d2_seeding(const WeightedPointSet& ps, int k, Rng& rng) {
  const int n = ps.size();
  Eigen::MatrixXd centers(k, ps.dim());
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::vector<double> mass(ps.weights);
  for (int c = 0; c < k; ++c) {
    double total = 0.0;
    for (int u = 0; u < n; ++u) total += chosen[u] ? 0.0 : mass[u];
    int pick = -1;
    if (total > 0.0) {
      std::discrete_distribution<int> dist(mass.begin(), mass.end());
      pick = dist(rng);
    } else {
      // Every remaining point coincides with a chosen center.
      for (int u = 0; u < n && pick < 0; ++u) {
        if (!chosen[u]) pick = u;
      }
    }
    chosen[pick] = 1;
    centers.row(c) = ps.points.row(pick);
    for (int u = 0; u < n; ++u) {
      d2[u] = std::min(d2[u], (ps.points.row(u) - centers.row(c)).squaredNorm());
      mass[u] = chosen[u] ? 0.0 : ps.weights[u] * d2[u];
    }
  }
  return centers;
}

KMeansResult lloyd(const WeightedPointSet& ps, int k, Eigen::MatrixXd centers,
                   const KMeansOptions& opts) {
  KMeansResult out;
  std::vector<int> labels(static_cast<std::size_t>(ps.size()));
  assign(ps, centers, labels);
  out.cost_history.push_back(assignment_cost(ps, labels, centers));
  fill_empty(ps, centers, labels, k);
  centers = weighted_centroids(ps, labels, k);
  double current = assignment_cost(ps, labels, centers);
  out.cost_history.push_back(current);

  std::vector<int> next(labels.size());
  int it = 1;
  for (; it < opts.max_iterations; ++it) {
    assign(ps, centers, next);
    fill_empty(ps, centers, next, k);
    if (next == labels) break;
    Eigen::MatrixXd moved = weighted_centroids(ps, next, k);
    const double updated = assignment_cost(ps, next, moved);
    out.cost_history.push_back(updated);
    labels.swap(next);
    centers = std::move(moved);
    const double gain = current - updated;
    current = updated;
    if (gain <= opts.rel_tol * std::max(current + gain, 0.0)) {
      ++it;
      break;
    }
  }
  out.labels = std::move(labels);
  out.centers.positions = std::move(centers);
  out.cost = current;
  out.iterations = it;
  return out;
}

}  // namespace

WeightedPointSet WeightedPointSet::make(Eigen::MatrixXd points, std::vector<double> weights) {
  if (weights.size() != static_cast<std::size_t>(points.rows())) {
    throw DomainError("weights and points differ in length");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("point weights must be positive");
  }
  if (!points.allFinite()) throw DomainError("points must be finite");
  return WeightedPointSet{std::move(points), std::move(weights)};
}

WeightedPointSet WeightedPointSet::from_embedding(const Graph& g, const SpectralEmbedding& emb) {
  return make(emb.points, g.degrees());
}

WeightedPointSet WeightedPointSet::from_sketch(const Graph& g, const HeatKernelSketch& sketch) {
  return make(sketch.points, g.degrees());
}

Eigen::MatrixXd weighted_centroids(const WeightedPointSet& ps, std::span<const int> labels, int k) {
  check_labels(ps, labels, k);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, ps.dim());
  std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
  for (int u = 0; u < ps.size(); ++u) {
    sums.row(labels[u]) += ps.weights[u] * ps.points.row(u);
    mass[labels[u]] += ps.weights[u];
  }
  for (int c = 0; c < k; ++c) {
    if (mass[c] == 0.0) throw DomainError("cluster " + std::to_string(c) + " is empty");
    sums.row(c) /= mass[c];
  }
  return sums;
}

double assignment_cost(const WeightedPointSet& ps, std::span<const int> labels,
                       const Eigen::MatrixXd& centers) {
  check_labels(ps, labels, static_cast<int>(centers.rows()));
  double total = 0.0;
  for (int u = 0; u < ps.size(); ++u) {
    total += ps.weights[u] * (ps.points.row(u) - centers.row(labels[u])).squaredNorm();
  }
  return total;
}

double cost(const WeightedPointSet& ps, std::span<const int> labels, int k) {
  return assignment_cost(ps, labels, weighted_centroids(ps, labels, k));
}

double cost(const WeightedPointSet& ps, const Partition& p) {
  return cost(ps, p.assignment(), p.k());
}

KMeansResult kmeans(const WeightedPointSet& ps, int k, std::uint64_t seed, const KMeansOptions& opts) {
  if (k < 1 || k > ps.size()) {
    throw DomainError("kmeans needs 1 <= k <= n (k = " + std::to_string(k) + ", n = " +
                      std::to_string(ps.size()) + ")");
  }
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < std::max(1, opts.n_init); ++r) {
    Rng rng = make_rng(seed, "kmeans", static_cast<std::uint64_t>(r));
    KMeansResult run = lloyd(ps, k, d2_seeding(ps, k, rng), opts);
    if (!have || run.cost < best.cost) {
      best = std::move(run);
      have = true;
    }
  }
  if (opts.cost_lower_bound && *opts.cost_lower_bound > 0.0) {
    best.apt_estimate = best.cost / *opts.cost_lower_bound;
  }
  return best;
}

int seed_sample_count(int k, double c_N) {
  if (k < 1) throw DomainError("seed_and_trim needs k >= 1");
  const double raw = k == 1 ? c_N : c_N * k * std::log(k + 1.0);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

Centers seed_and_trim(const WeightedPointSet& ps, int k, std::uint64_t seed,
                      const SeedAndTrimOptions& opts, int* survivors) {
  const int samples = seed_sample_count(k, opts.c_N);
  Eigen::VectorXd norms = ps.points.rowwise().squaredNorm();
  std::vector<double> mass(static_cast<std::size_t>(ps.size()));
  double total = 0.0;
  for (int u = 0; u < ps.size(); ++u) total += mass[u] = ps.weights[u] * norms[u];
  if (!(total > 0.0)) {
    if (survivors) *survivors = 0;
    throw SeedingFailure("all points are at the origin", 0);
  }

  Rng rng = make_rng(seed, "seed-and-trim");
  std::discrete_distribution<int> dist(mass.begin(), mass.end());
  std::vector<int> alive;
  const double scale = 1.0 / (1e4 * k);
  for (int i = 0; i < samples; ++i) {
    const int c = dist(rng);
    const double limit = norms[c] * scale;
    std::erase_if(alive, [&](int j) { return (ps.points.row(c) - ps.points.row(j)).squaredNorm() < limit; });
    alive.push_back(c);
  }
  if (survivors) *survivors = static_cast<int>(alive.size());
  if (static_cast<int>(alive.size()) < k) {
    throw SeedingFailure("only " + std::to_string(alive.size()) + " of " + std::to_string(k) +
                             " candidate centers survived trimming",
                         static_cast<int>(alive.size()));
  }
  Centers out;
  out.positions.resize(k, ps.dim());
  for (int i = 0; i < k; ++i) {
    out.positions.row(i) = ps.points.row(alive[i]);
    out.origin_vertices.push_back(alive[i]);
  }
  return out;
}

double grouping_epsilon(int k) { return std::max(0.0, std::log(static_cast<double>(k)) - 1.0); }

std::vector<int> group_by_nearest(const WeightedPointSet& ps, const Centers& centers, double eps,
                                  GroupingMode mode, std::uint64_t seed) {
  if (centers.k() < 1) throw DomainError("grouping needs at least one center");
  if (centers.positions.cols() != ps.dim()) throw DomainError("center dimension mismatch");
  std::vector<int> labels(static_cast<std::size_t>(ps.size()));
  if (mode == GroupingMode::exact) {
    for (int u = 0; u < ps.size(); ++u) labels[u] = nearest_center(centers.positions, ps.points.row(u));
    return labels;
  }
  LshOptions lo;
  lo.seed = substream_seed(seed, "grouping-lsh");
  CenterIndex index(centers.positions, lo);
  for (int u = 0; u < ps.size(); ++u) labels[u] = index.query(ps.points.row(u), eps);
  return labels;
}

double partition_score(const Graph& g, const Partition& p) {
  if (p.has_empty_cluster()) return std::numeric_limits<double>::infinity();
  if (p.k() == 1) return 0.0;
  double total = 0.0;
  for (double phi : cluster_conductances(g, p)) total += phi;
  return total;
}

SpectralPipelineResult spectral_cluster_pipeline(const Graph& g, int k, std::uint64_t seed,
                                                 const SpectralPipelineOptions& opts) {
  SpectralPipelineResult out;
  EigenSolverOptions eo = opts.eig;
  eo.seed = substream_seed(seed, "eigensolver");
  out.eig = bottom_eigenpairs(g, k, eo);
  const auto ps = WeightedPointSet::from_embedding(g, spectral_embed(g, out.eig));
  out.kmeans = kmeans(ps, k, substream_seed(seed, "kmeans"), opts.kmeans);
  out.partition = out.kmeans.partition(g);
  return out;
}

std::vector<double> temperature_schedule(double t_min, double t_max) {
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw DomainError("schedule needs 0 < t_min <= t_max");
  const int count = static_cast<int>(std::ceil(std::log2(t_max / t_min) - 1e-12)) + 1;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::ldexp(t_min, i));
  return out;
}

FastPipelineResult fast_cluster_pipeline(const Graph& g, int k, std::uint64_t seed,
                                         const FastPipelineOptions& opts) {
  const int n = g.num_vertices();
  if (k < 1 || k >= n) throw DomainError("fast pipeline needs 1 <= k < n");
  const double t_max = opts.t_max > 0.0 ? opts.t_max : std::pow(static_cast<double>(n), 3.0);
  const std::vector<double> schedule = temperature_schedule(opts.t_min, t_max);
  const double eps = grouping_epsilon(k);

  FastPipelineResult out;
  bool have = false;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    TemperatureDiagnostics diag;
    diag.t = schedule[i];
    const auto cfg = HeatKernelConfig::make(n, diag.t, opts.epsilon,
                                            substream_seed(seed, "sketch", i), opts.delta,
                                            opts.c_delta, opts.jl_constant);
    const HeatKernelSketch sketch = heat_sketch(g, cfg, opts.expm);
    diag.sketch_dim = cfg.sketch_dim;
    diag.krylov_steps = sketch.krylov_steps;
    const auto ps = WeightedPointSet::from_sketch(g, sketch);

    std::optional<Centers> centers;
    std::string last_error;
    for (int a = 0; a < std::max(1, opts.seeding_attempts) && !centers; ++a) {
      ++diag.attempts;
      try {
        centers = seed_and_trim(ps, k, substream_seed(seed, "seeding", i * 64 + a), opts.seeding,
                                &diag.survivors);
      } catch (const SeedingFailure& e) {
        last_error = e.what();
      }
    }
    if (!centers) {
      diag.status = "seeding_failure";
      failures.push_back("t = " + std::to_string(diag.t) + ": " + last_error);
      out.per_t.push_back(diag);
      continue;
    }
    diag.status = "ok";
    const auto labels = group_by_nearest(ps, *centers, eps, opts.grouping, substream_seed(seed, "grouping", i));
    Partition p = Partition::from_assignment(g, k, labels);
    diag.score = partition_score(g, p);
    if (!p.has_empty_cluster()) diag.raw_cost = cost(ps, p);
    out.per_t.push_back(diag);
    if (!have || diag.score <= out.score) {
      have = true;
      out.partition = std::move(p);
      out.best_t = diag.t;
      out.score = diag.score;
      out.raw_cost = diag.raw_cost;
      out.centers = std::move(*centers);
    }
  }
  if (!have) {
    throw PipelineError("seed_and_trim failed at every temperature", std::move(failures));
  }
  return out;
}

}  // namespace wellclust
