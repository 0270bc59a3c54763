#include <doctest.h>

#include <random>
#include <sstream>

#include "oracle.hpp"
#include "wellclust/errors.hpp"
#include "wellclust/gen.hpp"
#include "wellclust/heat_kernel.hpp"

using namespace wellclust;

TEST_CASE("expm_multiply closed forms") {
  const Graph k2 = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
  Eigen::VectorXd y(2);
  y << 1, 0;
  const Eigen::VectorXd x = expm_multiply(k2, 1.0, y, 1e-12);
  CHECK(x[0] == doctest::Approx((1 + std::exp(-2.0)) / 2).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-10));

  const Graph g = ring_of_cliques(3, 5).graph;
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(g.num_vertices(), -1.0, 2.0);
  CHECK(expm_multiply(g, 0.0, z, 1e-6) == z);
  CHECK_THROWS_AS(expm_multiply(g, -1.0, z, 1e-6), DomainError);
  CHECK_THROWS_AS(expm_multiply(g, 1.0, z, 0.0), DomainError);
}

TEST_CASE("expm_multiply against Taylor oracle") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 50.0);
  const std::vector<Instance> graphs = {ring_of_cliques(3, 6), disjoint_cliques(3, 4),
                                        planted_partition(2, 20, 0.4, 0.05, 1),
                                        noisy_cliques(4, 12, 10, 2)};
  for (const auto& inst : graphs) {
    const Eigen::MatrixXd l = oracle::laplacian(inst.graph);
    for (int r = 0; r < 5; ++r) {
      const double t = unif(rng);
      const Eigen::MatrixXd h = oracle::expm_neg(l, t);
      Eigen::VectorXd y(inst.graph.num_vertices());
      for (auto& v : y) v = normal(rng);
      for (double delta : {1e-4, 1e-8}) {
        ExpmStats stats;
        const Eigen::VectorXd x = expm_multiply(inst.graph, t, y, delta, {}, &stats);
        CHECK((x - h * y).norm() <= delta * y.norm());
        const Eigen::VectorXd scaled = expm_multiply(inst.graph, t, 3.0 * y, delta);
        CHECK((scaled - 3.0 * x).norm() <= 6.0 * delta * y.norm() + 1e-12);
      }
    }
  }
}

TEST_CASE("expm_multiply splits steps when the Krylov cap is small") {
  const Graph g = planted_partition(3, 20, 0.3, 0.05, 5).graph;
  const Eigen::MatrixXd h = oracle::expm_neg(oracle::laplacian(g), 40.0);
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(g.num_vertices(), 0.0, 1.0);
  ExpmOptions opts;
  opts.max_krylov = 6;
  ExpmStats stats;
  const Eigen::VectorXd x = expm_multiply(g, 40.0, y, 1e-8, opts, &stats);
  CHECK(stats.substeps > 1);
  CHECK((x - h * y).norm() <= 1e-8 * y.norm());
  opts.max_splits = 0;
  opts.max_krylov = 2;
  CHECK_THROWS_AS(expm_multiply(g, 40.0, y, 1e-12, opts), ConvergenceError);
}

TEST_CASE("eta distance") {
  const Instance inst = ring_of_cliques(3, 4);
  const Graph& g = inst.graph;
  const EigenPairs full = full_eigenpairs(g);
  CHECK(eta_distance_exact(g, full, 1.0, 2, 2) == 0.0);
  CHECK(eta_distance_exact(g, full, 0.0, 0, 5) ==
        doctest::Approx(1.0 / g.degree(0) + 1.0 / g.degree(5)));
  CHECK(eta_distance_exact(g, full, 1e4, 0, 5) < 1e-12);

  const Eigen::MatrixXd h = oracle::expm_neg(oracle::laplacian(g), 0.7);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(g.num_vertices());
  xi[1] = 1.0 / std::sqrt(g.degree(1));
  xi[7] = -1.0 / std::sqrt(g.degree(7));
  CHECK(eta_distance_exact(g, full, 0.7, 1, 7) == doctest::Approx((h * xi).squaredNorm()).epsilon(1e-10));

  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double eta = eta_distance_exact(g, full, t, 1, 9);
    CHECK(eta <= prev + 1e-15);
    prev = eta;
  }
  const EigenPairs partial = bottom_eigenpairs(g, 3);
  CHECK_THROWS_AS(eta_distance_exact(g, partial, 1.0, 0, 1), DomainError);
}

TEST_CASE("admissible temperature interval") {
  const auto iv = admissible_t_interval(0.001, 1.0, 100);
  REQUIRE(iv.has_value());
  CHECK(iv->lo == doctest::Approx(13.8155).epsilon(1e-5));
  CHECK(iv->hi == doctest::Approx(500.0));
  const auto open = admissible_t_interval(0.0, 0.5, 50);
  REQUIRE(open.has_value());
  CHECK(std::isinf(open->hi));
  CHECK(!admissible_t_interval(0.1, 0.5, 50).has_value());
  CHECK_THROWS_AS(admissible_t_interval(0.5, 0.1, 50), DomainError);
}

TEST_CASE("sketch configuration") {
  const auto a = HeatKernelConfig::make(1000, 4.0, 0.2, 1);
  const auto b = HeatKernelConfig::make(1000, 4.0, 0.1, 1);
  CHECK(std::abs(static_cast<double>(b.sketch_dim) / a.sketch_dim - 4.0) < 0.05);
  CHECK(a.delta == doctest::Approx(0.2 * 1e-9));
  HeatKernelConfig bad = a;
  bad.epsilon = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = a;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("sketch matches its definition and is reproducible") {
  const Graph g = ring_of_cliques(3, 4).graph;
  const int n = g.num_vertices();
  auto cfg = HeatKernelConfig::make(n, 1.5, 0.3, 9);
  const HeatKernelSketch s = heat_sketch(g, cfg);
  CHECK(s.points.rows() == n);
  CHECK(s.points.cols() == cfg.sketch_dim + 1);
  CHECK(s.points.col(cfg.sketch_dim).isConstant(std::sqrt(2 * cfg.delta / cfg.epsilon)));
  const HeatKernelSketch again = heat_sketch(g, cfg);
  CHECK(again.points == s.points);

  std::stringstream io;
  write_sketch(io, s);
  const HeatKernelSketch back = read_sketch(io);
  CHECK(back.points == s.points);
  CHECK(back.config.seed == cfg.seed);
  CHECK(back.config.t == cfg.t);
  std::istringstream junk("nonsense");
  CHECK_THROWS_AS(read_sketch(junk), ParseError);
}

TEST_CASE("sketch distortion band on a small ring") {
  const Graph g = ring_of_cliques(3, 4).graph;
  const int n = g.num_vertices();
  const EigenPairs full = full_eigenpairs(g);
  int inside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto cfg = HeatKernelConfig::make(n, 2.0, 0.2, seed);
    const HeatKernelSketch s = heat_sketch(g, cfg);
    const double add = 2 * cfg.delta * cfg.delta / cfg.epsilon;
    for (const auto& e : g.edges()) {
      const double eta = eta_distance_exact(g, full, cfg.t, e.u, e.v);
      const double d = s.distance2(e.u, e.v);
      inside += d >= (1 - 5 * cfg.epsilon) * eta - add && d <= (1 + 5 * cfg.epsilon) * eta + add;
      ++total;
    }
  }
  CHECK(inside >= 0.99 * total);
}

TEST_CASE("sketch budget below double precision is floored") {
  const Graph g = ring_of_cliques(3, 4).graph;
  const auto cfg = HeatKernelConfig::make(g.num_vertices(), 2.0, 0.3, 1, 1e-20);
  const HeatKernelSketch s = heat_sketch(g, cfg);
  CHECK(s.config.delta >= kMinRowDelta);
  CHECK(s.additive_pad == doctest::Approx(std::sqrt(2 * s.config.delta / cfg.epsilon)));
  const auto loose = HeatKernelConfig::make(g.num_vertices(), 2.0, 0.3, 1, 1e-3);
  CHECK(heat_sketch(g, loose).config.delta == loose.delta);
}
