#include "wellclust/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "wellclust/errors.hpp"
#include "wellclust/parallel.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {
namespace {

/// exp(-t L) restricted to the orthogonal complement of ker(L).
class HeatPropagator {
 public:
  HeatPropagator(const Graph& g, const ExpmOptions& opts) : g_(g), opts_(opts) {
    component_ = connected_components(g, &components_);
    sqrt_vol_.assign(static_cast<std::size_t>(components_), 0.0);
    for (Vertex u = 0; u < g.num_vertices(); ++u) sqrt_vol_[component_[u]] += g.degree(u);
    for (double& s : sqrt_vol_) s = std::sqrt(s);
  }

  int components() const noexcept { return components_; }

  /// Removes the ker(L) component of v in place and returns it.
  Eigen::VectorXd split_null(Eigen::Ref<Eigen::VectorXd> v) const {
    std::vector<double> coeff(static_cast<std::size_t>(components_), 0.0);
    const Vertex n = g_.num_vertices();
    for (Vertex u = 0; u < n; ++u) {
      coeff[component_[u]] += std::sqrt(g_.degree(u)) * v[u] / sqrt_vol_[component_[u]];
    }
    Eigen::VectorXd null(n);
    for (Vertex u = 0; u < n; ++u) {
      null[u] = coeff[component_[u]] * std::sqrt(g_.degree(u)) / sqrt_vol_[component_[u]];
    }
    v -= null;
    return null;
  }

  /// Propagates v (orthogonal to ker L) for time t with absolute error budget.
  Eigen::VectorXd propagate(const Eigen::VectorXd& v, double t, double budget, int depth,
                            ExpmStats& stats) const {
    const double norm = v.norm();
    if (norm <= budget) {
      ++stats.substeps;
      stats.error_estimate += norm;
      return Eigen::VectorXd::Zero(v.size());
    }
    Eigen::VectorXd x;
    if (krylov(v, t, budget, x, stats)) return x;
    if (depth >= opts_.max_splits) {
      throw ConvergenceError("exponential action did not converge after " +
                                 std::to_string(depth) + " time-step splits",
                             {stats.error_estimate});
    }
    Eigen::VectorXd half = propagate(v, t / 2, budget / 2, depth + 1, stats);
    return propagate(half, t / 2, budget / 2, depth + 1, stats);
  }

 private:
  bool krylov(const Eigen::VectorXd& v, double t, double budget, Eigen::VectorXd& x,
              ExpmStats& stats) const {
    const Eigen::Index n = g_.num_vertices();
    const Eigen::Index rank = n - components_;
    const Eigen::Index cap = std::max<Eigen::Index>(1, std::min<Eigen::Index>(opts_.max_krylov, rank));
    const double beta0 = v.norm();

    Eigen::MatrixXd basis(n, cap);
    Eigen::VectorXd alpha(cap);
    Eigen::VectorXd beta(cap);
    Eigen::VectorXd w(n);
    Eigen::VectorXd prev;
    basis.col(0) = v / beta0;
    Eigen::Index next_check = 4;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

    for (Eigen::Index j = 0; j < cap; ++j) {
      normalized_laplacian_apply(g_, basis.col(j), w);
      alpha[j] = basis.col(j).dot(w);
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      }
      split_null(w);
      beta[j] = w.norm();
      const Eigen::Index m = j + 1;
      const bool exhausted = beta[j] <= 1e-12 || m == rank;
      if (m == next_check || exhausted || m == cap) {
        Eigen::VectorXd diag = alpha.head(m);
        Eigen::VectorXd sub = beta.head(m - 1);
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const Eigen::MatrixXd& q = tri.eigenvectors();
        Eigen::VectorXd decay = (-t * tri.eigenvalues().array()).exp();
        Eigen::VectorXd coeff = beta0 * (q * decay.cwiseProduct(q.row(0).transpose()));
        const double estimate = exhausted ? 0.0 : beta[j] * std::abs(coeff[m - 1]);
        double diff = std::numeric_limits<double>::infinity();
        if (prev.size() > 0) {
          Eigen::VectorXd padded = Eigen::VectorXd::Zero(m);
          padded.head(prev.size()) = prev;
          diff = (coeff - padded).norm();
        }
        if (exhausted || (diff <= budget / 2 && estimate <= budget / 2)) {
          x = basis.leftCols(m) * coeff;
          stats.krylov_steps += static_cast<int>(m);
          ++stats.substeps;
          stats.error_estimate += exhausted ? 0.0 : std::max(diff, estimate);
          return true;
        }
        prev = std::move(coeff);
        next_check = std::max(next_check + 2, static_cast<Eigen::Index>(std::ceil(1.5 * next_check)));
      }
      if (j + 1 < cap) basis.col(j + 1) = w / beta[j];
    }
    stats.krylov_steps += static_cast<int>(cap);
    return false;
  }

  const Graph& g_;
  ExpmOptions opts_;
  std::vector<int> component_;
  std::vector<double> sqrt_vol_;
  int components_ = 0;
};

Eigen::VectorXd expm_with(const HeatPropagator& prop, double t,
                          const Eigen::Ref<const Eigen::VectorXd>& y, double delta,
                          ExpmStats& stats) {
  Eigen::VectorXd rest = y;
  if (t == 0.0) return rest;
  Eigen::VectorXd x = prop.split_null(rest);
  x += prop.propagate(rest, t, delta * y.norm(), 0, stats);
  return x;
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("truncated sketch file", 0);
  return value;
}

constexpr char kSketchMagic[8] = {'W', 'C', 'S', 'K', 'E', 'T', 'C', 'H'};

}  // namespace

Eigen::VectorXd expm_multiply(const Graph& g, double t, const Eigen::Ref<const Eigen::VectorXd>& y,
                              double delta, const ExpmOptions& opts, ExpmStats* stats) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("expm_multiply needs finite t >= 0");
  if (!(delta > 0.0)) throw DomainError("expm_multiply needs delta > 0");
  if (y.size() != g.num_vertices()) throw DomainError("vector length does not match vertex count");
  ExpmStats local;
  HeatPropagator prop(g, opts);
  Eigen::VectorXd x = expm_with(prop, t, y, delta, local);
  if (stats != nullptr) *stats = local;
  return x;
}

Eigen::MatrixXd dense_heat_kernel(const EigenPairs& full, double t) {
  Eigen::VectorXd decay(full.k());
  for (int i = 0; i < full.k(); ++i) decay[i] = std::exp(-t * full.values[i]);
  return full.vectors * decay.asDiagonal() * full.vectors.transpose();
}

EtaSplit eta_distance_split(const Graph& g, const EigenPairs& full, double t, Vertex u, Vertex v,
                            int k) {
  if (!full.complete() || full.vectors.rows() != g.num_vertices()) {
    throw DomainError("exact heat-kernel distance needs the full spectrum of this graph");
  }
  EtaSplit out;
  if (u == v) return out;
  for (int i = 0; i < full.k(); ++i) {
    const double diff = full.vectors(u, i) * g.inv_sqrt_degree(u) -
                        full.vectors(v, i) * g.inv_sqrt_degree(v);
    const double term = std::exp(-2.0 * t * full.values[i]) * diff * diff;
    (i < k ? out.head : out.tail) += term;
  }
  return out;
}

double eta_distance_exact(const Graph& g, const EigenPairs& full, double t, Vertex u, Vertex v) {
  return eta_distance_split(g, full, t, u, v, full.k()).total();
}

double TemperatureInterval::geometric_mid() const noexcept {
  if (std::isinf(hi)) return lo * 4.0;
  return std::sqrt(lo * hi);
}

std::optional<TemperatureInterval> admissible_t_interval(double lambda_k, double lambda_k1, int n) {
  if (lambda_k < 0.0 || lambda_k1 < lambda_k) {
    throw DomainError("admissible_t_interval needs 0 <= lambda_k <= lambda_{k+1}");
  }
  if (lambda_k1 <= 0.0) return std::nullopt;
  TemperatureInterval iv;
  iv.lo = 3.0 * std::log(static_cast<double>(n)) / lambda_k1;
  iv.hi = lambda_k > 0.0 ? 1.0 / (2.0 * lambda_k) : std::numeric_limits<double>::infinity();
  if (iv.lo >= iv.hi) return std::nullopt;
  return iv;
}

int sketch_dimension(int n, double epsilon, double jl_constant) {
  const double rows = jl_constant * std::log(static_cast<double>(std::max(n, 2))) /
                      (epsilon * epsilon);
  return std::max(1, static_cast<int>(std::ceil(rows)));
}

HeatKernelConfig HeatKernelConfig::make(int n, double t, double epsilon, std::uint64_t seed,
                                        std::optional<double> delta, double c_delta,
                                        double jl_constant) {
  HeatKernelConfig cfg;
  cfg.t = t;
  cfg.epsilon = epsilon;
  cfg.seed = seed;
  cfg.c_delta = c_delta;
  cfg.jl_constant = jl_constant;
  cfg.sketch_dim = sketch_dimension(n, epsilon, jl_constant);
  cfg.delta = delta ? *delta : epsilon * std::pow(static_cast<double>(n), -c_delta);
  return cfg;
}

void HeatKernelConfig::validate() const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("temperature must be finite and >= 0");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("epsilon must lie in (0, 1/2)");
  if (sketch_dim < 1) throw DomainError("sketch_dim must be at least 1");
}

HeatKernelSketch heat_sketch(const Graph& g, const HeatKernelConfig& cfg, const ExpmOptions& opts) {
  cfg.validate();
  const Vertex n = g.num_vertices();
  const int rows = cfg.sketch_dim;
  const double entry_scale = 1.0 / std::sqrt(static_cast<double>(rows));

  auto gaussian_row = [&](int r) {
    Rng rng = make_rng(cfg.seed, "sketch-row", static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal(0.0, entry_scale);
    Eigen::VectorXd q(n);
    for (Vertex u = 0; u < n; ++u) q[u] = normal(rng);
    return q;
  };

  // Per-row budgets delta / ||Q||_F keep the Frobenius norm of the total
  // error operator at most delta.
  double frob2 = 0.0;
  for (int r = 0; r < rows; ++r) frob2 += gaussian_row(r).squaredNorm();
  // Budgets below kMinRowDelta are not reachable in double precision; the
  // delta actually delivered is recorded in the returned config.
  const double frob = std::max(1.0, std::sqrt(frob2));
  const double row_delta = std::max(cfg.delta / frob, kMinRowDelta);

  HeatPropagator prop(g, opts);
  HeatKernelSketch sketch;
  sketch.config = cfg;
  sketch.config.delta = std::max(cfg.delta, row_delta * frob);
  sketch.points.resize(n, rows + 1);
  sketch.additive_pad = std::sqrt(2.0 * sketch.config.delta / cfg.epsilon);
  const double scale = 1.0 / std::sqrt(1.0 + 5.0 * cfg.epsilon);
  std::vector<int> steps(static_cast<std::size_t>(rows), 0);

  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t r) {
    ExpmStats stats;
    const Eigen::VectorXd q = gaussian_row(static_cast<int>(r));
    const Eigen::VectorXd z = expm_with(prop, cfg.t, q, row_delta, stats);
    for (Vertex u = 0; u < n; ++u) {
      sketch.points(u, static_cast<Eigen::Index>(r)) = scale * z[u] * g.inv_sqrt_degree(u);
    }
    steps[r] = stats.krylov_steps;
  });
  sketch.points.col(rows).setConstant(sketch.additive_pad);
  for (int s : steps) sketch.krylov_steps += s;
  return sketch;
}

void write_sketch(std::ostream& out, const HeatKernelSketch& sketch) {
  out.write(kSketchMagic, sizeof(kSketchMagic));
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(sketch.points.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(sketch.config.sketch_dim));
  put<std::uint64_t>(out, sketch.config.seed);
  put<double>(out, sketch.config.t);
  put<double>(out, sketch.config.delta);
  put<double>(out, sketch.config.epsilon);
  put<double>(out, sketch.additive_pad);
  for (Eigen::Index u = 0; u < sketch.points.rows(); ++u) {
    for (Eigen::Index c = 0; c < sketch.points.cols(); ++c) put<double>(out, sketch.points(u, c));
  }
}

HeatKernelSketch read_sketch(std::istream& in) {
  char magic[sizeof(kSketchMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSketchMagic, sizeof(magic)) != 0) {
    throw ParseError("not a sketch file", 0);
  }
  if (get<std::uint32_t>(in) != 1) throw ParseError("unsupported sketch version", 0);
  HeatKernelSketch sketch;
  const auto n = get<std::uint64_t>(in);
  sketch.config.sketch_dim = static_cast<int>(get<std::uint64_t>(in));
  sketch.config.seed = get<std::uint64_t>(in);
  sketch.config.t = get<double>(in);
  sketch.config.delta = get<double>(in);
  sketch.config.epsilon = get<double>(in);
  sketch.additive_pad = get<double>(in);
  sketch.points.resize(static_cast<Eigen::Index>(n), sketch.config.sketch_dim + 1);
  for (Eigen::Index u = 0; u < sketch.points.rows(); ++u) {
    for (Eigen::Index c = 0; c < sketch.points.cols(); ++c) sketch.points(u, c) = get<double>(in);
  }
  return sketch;
}

}  // namespace wellclust
