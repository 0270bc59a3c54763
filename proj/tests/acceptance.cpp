// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "wellclust/analysis.hpp"
#include "wellclust/cluster.hpp"
#include "wellclust/errors.hpp"
#include "wellclust/gen.hpp"
#include "wellclust/heat_kernel.hpp"

using namespace wellclust;

namespace {

// Pinned tolerances.
constexpr double kSlack = 1e-9;
constexpr double kEigTol = 1e-8;
constexpr double kSubspaceTol = 1e-6;
constexpr double kApplyTol = 1e-12;
constexpr double kEtaTol = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Analysis {
  EigenPairs eig;
  GapReport gap;
  StructureReport sr;
  ApproximateCenters ac;
};

Analysis analyse(const Instance& inst) {
  Analysis a;
  a.eig = bottom_eigenpairs(inst.graph, inst.planted.k() + 1);
  a.gap = gap_report(inst.graph, a.eig, inst.planted);
  a.sr = structure_report(inst.graph, a.eig, inst.planted, a.gap);
  a.ac = approximate_centers(inst.graph, a.eig, inst.planted, a.sr, a.gap);
  return a;
}

bool qualifies(const GapReport& gap) {
  const double k = gap.k;
  return gap.upsilon_lower >= kPart2GapFactor * k * k;
}

// Corpus over all four families with n <= 2000 and k <= 8.
std::vector<Instance> corpus() {
  std::vector<Instance> out;
  const int sizes[] = {6, 10, 16, 24, 40, 64, 100, 160, 250};
  for (int idx = 0; idx < 216; ++idx) {
    const int family = idx % 4;
    int k = 2 + (idx / 4) % 7;
    int s = sizes[(idx / 28 + idx) % 9];
    s = std::min(s, 2000 / std::max(k, 3));
    const std::uint64_t seed = static_cast<std::uint64_t>(idx);
    switch (family) {
      case 0:
        out.push_back(disjoint_cliques(k, s));
        break;
      case 1:
        out.push_back(ring_of_cliques(std::max(k, 3), s));
        break;
      case 2: {
        const double p = std::min(0.6, 12.0 / (s - 1));
        const double q = p / (20.0 * k);
        out.push_back(planted_partition(k, s, p, q, seed));
        break;
      }
      default:
        out.push_back(noisy_cliques(std::max(k, 3), s, static_cast<int>(idx % 7) * std::max(1, s / 8), seed));
    }
  }
  // Extra instances that meet the Part 2 hypothesis with a finite gap.
  for (int s : {32, 40, 48}) {
    out.push_back(ring_of_cliques(3, s));
    out.push_back(ring_of_cliques(4, s));
  }
  out.push_back(ring_of_cliques(5, 64));
  return out;
}

bool one_per_cluster(const Centers& c, const Partition& ref) {
  std::vector<int> seen(ref.k(), 0);
  for (Vertex v : c.origin_vertices) ++seen[ref.cluster_of(v)];
  for (int s : seen)
    if (s != 1) return false;
  return true;
}

SpectralEmbedding head_embedding(const Graph& g, const EigenPairs& eig, int k) {
  EigenPairs head{std::vector<double>(eig.values.begin(), eig.values.begin() + k), eig.vectors.leftCols(k), {}};
  return spectral_embed(g, head);
}

void criteria_1_to_3() {
  const auto start = Clock::now();
  const std::vector<Instance> instances = corpus();
  int part1_ok = 0, part1_total = 0, errors = 0;
  int q_total = 0, q_finite = 0, part2_ok = 0;
  int l41_ok = 0, l42_ok = 0, l43_ok = 0;
  double part2_margin = std::numeric_limits<double>::infinity();
  double l41_margin = std::numeric_limits<double>::infinity();
  int max_n = 0, max_k = 0;
  for (const Instance& inst : instances) {
    max_n = std::max(max_n, static_cast<int>(inst.graph.num_vertices()));
    max_k = std::max(max_k, inst.planted.k());
    ++part1_total;
    Analysis a;
    try {
      a = analyse(inst);
    } catch (const std::exception& e) {
      ++errors;
      std::printf("  instance %d: %s\n", part1_total - 1, e.what());
      continue;
    }
    const int k = inst.planted.k();
    bool ok = true;
    for (int i = 0; i < k; ++i) ok &= a.sr.part1_residuals[i] <= a.sr.part1_bounds[i] + kSlack;
    part1_ok += ok;

    if (!qualifies(a.gap)) continue;
    ++q_total;
    q_finite += std::isfinite(a.gap.upsilon_lower);
    bool p2 = true;
    for (int i = 0; i < k; ++i) {
      p2 &= a.sr.part2_residuals[i] <= a.sr.part2_bound + kSlack;
      part2_margin = std::min(part2_margin, a.sr.part2_bound - a.sr.part2_residuals[i]);
    }
    part2_ok += p2;
    l41_ok += a.ac.cost_sum <= a.ac.cost_bound + kSlack;
    l41_margin = std::min(l41_margin, a.ac.cost_bound - a.ac.cost_sum);
    bool norms = true;
    for (double v : a.ac.scaled_norms) norms &= v >= 0.9 - kSlack && v <= 1.1 + kSlack;
    l42_ok += norms;
    l43_ok += a.ac.separation >= a.ac.separation_bound - kSlack;
  }
  const double secs = seconds_since(start);
  report(1, part1_total >= 200 && part1_ok == part1_total && max_n <= 2000 && max_k <= 8 && secs < 300,
         fmt("part 1 holds on %d/%d instances (%d errors, max n %d, max k %d) in %.1f s", part1_ok, part1_total,
             errors, max_n, max_k, secs));
  report(2, q_finite > 0 && part2_ok == q_total,
         fmt("part 2 holds on %d/%d qualifying instances (%d with finite gap), min margin %.3e", part2_ok, q_total,
             q_finite, part2_margin));
  report(3, q_finite > 0 && l41_ok == q_total && l42_ok == q_total && l43_ok == q_total,
         fmt("center cost %d/%d (min margin %.3e), center norms %d/%d, separation %d/%d", l41_ok, q_total,
             l41_margin, l42_ok, q_total, l43_ok, q_total));
}

void criterion_4() {
  const auto start = Clock::now();
  const Instance ring = ring_of_cliques(4, 16);
  const Instance dc = disjoint_cliques(4, 16);
  int ring_ok = 0, dc_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = spectral_cluster_pipeline(ring.graph, 4, seed);
    ring_ok += match_partitions(ring.graph, r.partition, ring.planted).max_fraction <= 0.05;
    const auto d = spectral_cluster_pipeline(dc.graph, 4, seed);
    dc_ok += match_partitions(dc.graph, d.partition, dc.planted).max_fraction == 0.0;
  }
  const double secs = seconds_since(start);
  report(4, ring_ok >= 95 && dc_ok == 100 && secs < 120,
         fmt("ring_of_cliques(4,16) within 0.05 in %d/100, disjoint_cliques(4,16) exact in %d/100, %.1f s", ring_ok,
             dc_ok, secs));
}

void criterion_5() {
  auto successes = [](const Instance& inst) {
    const int k = inst.planted.k();
    const EigenPairs eig = bottom_eigenpairs(inst.graph, k);
    const auto ps = WeightedPointSet::from_embedding(inst.graph, spectral_embed(inst.graph, eig));
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      try {
        ok += one_per_cluster(seed_and_trim(ps, k, seed), inst.planted);
      } catch (const SeedingFailure&) {
      }
    }
    return ok;
  };
  const int ring = successes(ring_of_cliques(5, 20));
  const int dc = successes(disjoint_cliques(5, 20));
  report(5, ring >= 50 && dc >= 99,
         fmt("one center per cluster: ring_of_cliques(5,20) %d/100, disjoint_cliques(5,20) %d/100", ring, dc));
}

void criterion_6() {
  const std::vector<Instance> instances = {ring_of_cliques(4, 16), ring_of_cliques(3, 24), ring_of_cliques(5, 32),
                                           disjoint_cliques(4, 16), noisy_cliques(4, 16, 3, 1),
                                           planted_partition(3, 50, 0.5, 0.005, 2), ring_of_cliques(3, 8)};
  long pairs = 0, ok_pairs = 0;
  int used = 0;
  for (const Instance& inst : instances) {
    const Graph& g = inst.graph;
    const int n = g.num_vertices();
    const int k = inst.planted.k();
    const EigenPairs full = full_eigenpairs(g);
    const auto iv = admissible_t_interval(std::max(0.0, full.values[k - 1]), full.values[k], n);
    if (!iv) continue;
    ++used;
    const double t = iv->geometric_mid();
    const Eigen::MatrixXd f = head_embedding(g, full, k).points;
    double max_inv_d = 0.0;
    for (Vertex u = 0; u < n; ++u) max_inv_d = std::max(max_inv_d, 1.0 / g.degree(u));
    const double tail_bound = std::pow(static_cast<double>(n), -5.0) * std::max(1.0, max_inv_d);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        const EtaSplit s = eta_distance_split(g, full, t, u, v, k);
        const double dist = (f.row(u) - f.row(v)).squaredNorm();
        const bool ok = s.head >= dist / std::exp(1.0) - kSlack && s.head <= dist + kSlack &&
                        s.tail <= tail_bound + kSlack;
        ok_pairs += ok;
        ++pairs;
      }
    }
  }
  report(6, used >= 3 && ok_pairs == pairs,
         fmt("sandwich holds for %ld/%ld pairs on %d instances with a non-empty interval (of %zu)", ok_pairs, pairs,
             used, instances.size()));
}

void criterion_7() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif_t(0.0, 50.0);
  std::uniform_int_distribution<int> family(0, 3);
  int ok = 0, total = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t seed = static_cast<std::uint64_t>(trial);
    Instance inst;
    switch (family(rng)) {
      case 0:
        inst = ring_of_cliques(3 + trial % 3, 4 + trial % 9);
        break;
      case 1:
        inst = disjoint_cliques(2 + trial % 3, 3 + trial % 10);
        break;
      case 2:
        inst = planted_partition(2 + trial % 3, 8 + trial % 12, 0.5, 0.05, seed);
        break;
      default:
        inst = noisy_cliques(3 + trial % 2, 6 + trial % 8, trial % 10, seed);
    }
    const Graph& g = inst.graph;
    const oracle::Eig e = oracle::jacobi(oracle::laplacian(g));
    const double t = unif_t(rng);
    Eigen::VectorXd y(g.num_vertices());
    for (auto& x : y) x = normal(rng);
    const Eigen::VectorXd decay = (-t * e.values.array()).exp();
    const Eigen::VectorXd exact = e.vectors * (decay.asDiagonal() * (e.vectors.transpose() * y));
    for (double delta : {1e-4, 1e-8}) {
      const Eigen::VectorXd x = expm_multiply(g, t, y, delta);
      const double rel = (x - exact).norm() / y.norm();
      worst = std::max(worst, rel / delta);
      ok += rel <= delta;
      ++total;
    }
  }
  report(7, ok == total, fmt("%d/%d (graph, t, y, delta) cases within budget, worst error/budget %.3f", ok, total,
                             worst));
}

void criterion_8() {
  struct Case {
    Instance inst;
    double epsilon;
  };
  const std::vector<Case> cases = {{ring_of_cliques(4, 16), 0.1},
                                   {planted_partition(3, 50, 0.5, 0.005, 3), 0.2},
                                   {noisy_cliques(4, 24, 10, 4), 0.2}};
  long inside = 0, total = 0;
  for (const Case& c : cases) {
    const Graph& g = c.inst.graph;
    const int n = g.num_vertices();
    const int k = c.inst.planted.k();
    const EigenPairs full = full_eigenpairs(g);
    const auto iv = admissible_t_interval(std::max(0.0, full.values[k - 1]), full.values[k], n);
    const double t = iv ? iv->geometric_mid() : 4.0;
    std::mt19937_64 pick(7);
    std::uniform_int_distribution<int> vertex(0, n - 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto cfg = HeatKernelConfig::make(n, t, c.epsilon, seed);
      const HeatKernelSketch s = heat_sketch(g, cfg);
      const double add = 2 * cfg.delta * cfg.delta / cfg.epsilon;
      for (int r = 0; r < 500; ++r) {
        const Vertex u = vertex(pick);
        Vertex v = vertex(pick);
        if (u == v) v = (v + 1) % n;
        const double eta = eta_distance_exact(g, full, t, u, v);
        const double d = s.distance2(u, v);
        inside += d >= (1 - 5 * cfg.epsilon) * eta - add && d <= (1 + 5 * cfg.epsilon) * eta + add;
        ++total;
      }
    }
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(total);
  report(8, frac >= 0.99, fmt("%ld/%ld sampled pairs inside the band (%.4f)", inside, total, frac));
}

void criterion_9() {
  const auto start = Clock::now();
  const Instance ring = ring_of_cliques(4, 16);
  int ring_ok = 0, pp_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    try {
      const auto r = fast_cluster_pipeline(ring.graph, 4, seed);
      ring_ok += match_partitions(ring.graph, r.partition, ring.planted).max_fraction <= 0.1;
    } catch (const PipelineError&) {
    }
    const Instance pp = planted_partition(3, 50, 0.5, 0.005, seed);
    try {
      const auto r = fast_cluster_pipeline(pp.graph, 3, seed);
      pp_ok += match_partitions(pp.graph, r.partition, pp.planted).max_fraction <= 0.1;
    } catch (const PipelineError&) {
    }
  }
  const double secs = seconds_since(start);

  // Scaling on sparse planted partitions with k = 4 (informational).
  std::string scaling;
  for (int n : {1000, 10000}) {
    const int k = 4, s = n / k;
    const Instance inst = planted_partition(k, s, 12.0 / (s - 1), 1.0 / (3.0 * s), 1);
    FastPipelineOptions opts;
    opts.t_max = 4096;
    const auto t0 = Clock::now();
    const auto r = fast_cluster_pipeline(inst.graph, k, 1, opts);
    const double el = seconds_since(t0);
    scaling += fmt(" n=%d m=%lld %.2fs (%.2e s/edge, frac %.3f);", n, static_cast<long long>(inst.graph.num_edges()),
                   el, el / inst.graph.num_edges(), match_partitions(inst.graph, r.partition, inst.planted).max_fraction);
  }
  report(9, ring_ok >= 90 && pp_ok >= 90,
         fmt("ring_of_cliques(4,16) %d/100, planted_partition(3,50,0.5,0.005) %d/100 within 0.1 in %.1f s; scaling:%s",
             ring_ok, pp_ok, secs, scaling.c_str()));
}

void criterion_10() {
  std::vector<Instance> suite = {ring_of_cliques(3, 4),  ring_of_cliques(4, 16), ring_of_cliques(5, 8),
                                 disjoint_cliques(3, 5), disjoint_cliques(4, 16), noisy_cliques(4, 12, 10, 1),
                                 noisy_cliques(3, 20, 4, 2)};
  for (std::uint64_t s = 0; s < 6; ++s) suite.push_back(planted_partition(2 + s % 3, 10 + 2 * s, 0.5, 0.04, s));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  int checked = 0, ok = 0;
  for (const Instance& inst : suite) {
    const Graph& g = inst.graph;
    const int n = g.num_vertices();
    if (n > 64) continue;
    ++checked;
    bool pass = true;
    const Eigen::MatrixXd l = oracle::laplacian(g);
    for (int r = 0; r < 5; ++r) {
      Eigen::VectorXd x(n);
      for (auto& v : x) v = normal(rng);
      pass &= (normalized_laplacian_apply(g, x) - l * x).norm() <= kApplyTol * (1 + x.norm());
    }
    const oracle::Eig ref = oracle::jacobi(l);
    const int k = inst.planted.k() + 1;
    for (const EigenSolverOptions& opts : {EigenSolverOptions{}, [] {
                                             EigenSolverOptions o;
                                             o.dense_threshold = 0;
                                             return o;
                                           }()}) {
      const EigenPairs eig = bottom_eigenpairs(g, k, opts);
      for (int i = 0; i < k; ++i) pass &= std::abs(eig.values[i] - ref.values[i]) <= kEigTol;
      int hi = k;
      while (hi < n && ref.values[hi] - ref.values[k - 1] < 1e-7) ++hi;
      pass &= oracle::subspace_distance(ref.vectors.leftCols(hi), eig.vectors) <= kSubspaceTol;
    }
    const EigenPairs full = full_eigenpairs(g);
    for (double t : {0.0, 0.5, 3.0, 20.0}) {
      const Eigen::MatrixXd h = oracle::expm_neg(l, t);
      for (int r = 0; r < 10; ++r) {
        const Vertex u = static_cast<Vertex>(rng() % n);
        const Vertex v = static_cast<Vertex>(rng() % n);
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
        xi[u] += 1.0 / std::sqrt(g.degree(u));
        xi[v] -= 1.0 / std::sqrt(g.degree(v));
        const double want = (h * xi).squaredNorm();
        pass &= std::abs(eta_distance_exact(g, full, t, u, v) - want) <= kEtaTol * std::max(1.0, want);
      }
    }
    ok += pass;
  }
  report(10, ok == checked && checked > 0,
         fmt("Laplacian, eigenpairs and heat distances match dense oracles on %d/%d graphs", ok, checked));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::function<void()>> steps = {criteria_1_to_3, criterion_4, criterion_5, criterion_6,
                                                    criterion_7,     criterion_8, criterion_9, criterion_10};
  for (const auto& step : steps) step();
  std::printf("%d failing criteria, %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
