#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "wellclust/graph.hpp"
#include "wellclust/spectral.hpp"

namespace wellclust {

struct ExpmOptions {
  /// Largest Krylov basis built before the time step is split in half.
  int max_krylov = 256;
  /// Maximum depth of time-step halving before ConvergenceError.
  int max_splits = 30;
};

struct ExpmStats {
  int krylov_steps = 0;  ///< total Lanczos steps over all substeps
  int substeps = 0;
  double error_estimate = 0.0;  ///< sum of per-substep a posteriori estimates
};

/// x with ||exp(-t L) y - x|| <= delta ||y||, L the normalized Laplacian.
///
/// The exact null space of L (one D^{1/2} 1_C direction per connected
/// component C) is split off analytically; the rest is propagated with a
/// Lanczos approximation that stops once two successive checkpoints differ by
/// at most delta ||y|| / 2 and the a posteriori estimate agrees. Steps that
/// would exceed ExpmOptions::max_krylov are split into two half steps with
/// half the budget each.
Eigen::VectorXd expm_multiply(const Graph& g, double t, const Eigen::Ref<const Eigen::VectorXd>& y,
                              double delta, const ExpmOptions& opts = {},
                              ExpmStats* stats = nullptr);

/// exp(-t L) via the full eigendecomposition (test scale).
Eigen::MatrixXd dense_heat_kernel(const EigenPairs& full, double t);

/// eta_t(u, v) = sum_i exp(-2 t lambda_i) (f_i(u)/sqrt(d_u) - f_i(v)/sqrt(d_v))^2.
/// Requires the complete spectrum.
double eta_distance_exact(const Graph& g, const EigenPairs& full, double t, Vertex u, Vertex v);

/// eta_t split into the first-k eigen-directions and the remaining tail.
struct EtaSplit {
  double head = 0.0;
  double tail = 0.0;
  double total() const noexcept { return head + tail; }
};
EtaSplit eta_distance_split(const Graph& g, const EigenPairs& full, double t, Vertex u, Vertex v,
                            int k);

/// Open interval of temperatures for which the heat-kernel distance tracks
/// the spectral embedding distance.
struct TemperatureInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  /// Midpoint on a log scale (lo * 4 when hi is unbounded).
  double geometric_mid() const noexcept;
};

/// (3 ln n / lambda_{k+1}, 1 / (2 lambda_k)), or nullopt when empty.
std::optional<TemperatureInterval> admissible_t_interval(double lambda_k, double lambda_k1, int n);

struct HeatKernelConfig {
  double t = 0.0;
  double delta = 0.0;
  double epsilon = 0.25;
  int sketch_dim = 1;
  std::uint64_t seed = 0;
  double c_delta = 3.0;
  double jl_constant = 4.0;

  /// Fills sketch_dim = ceil(jl_constant * epsilon^-2 * ln n) and, when delta
  /// is not given, delta = epsilon * n^-c_delta.
  static HeatKernelConfig make(int n, double t, double epsilon, std::uint64_t seed,
                               std::optional<double> delta = std::nullopt, double c_delta = 3.0,
                               double jl_constant = 4.0);

  /// Throws DomainError on t < 0, delta <= 0, epsilon outside (0, 1/2) or
  /// sketch_dim < 1.
  void validate() const;
};

int sketch_dimension(int n, double epsilon, double jl_constant = 4.0);

/// Per-vertex Gaussian sketch of the heat-kernel embedding.
///
/// Column r < sketch_dim of `points` is (1+5 eps)^{-1/2} D^{-1/2} Z q_r where Z
/// approximates exp(-t L) and q_r is the r-th row of a Gaussian matrix with
/// N(0, 1/sketch_dim) entries drawn from the (seed, r) substream. The last
/// column is the constant pad sqrt(2 delta / eps).
struct HeatKernelSketch {
  HeatKernelConfig config;
  Eigen::MatrixXd points;  ///< n x (sketch_dim + 1)
  double additive_pad = 0.0;
  int krylov_steps = 0;

  double distance2(Vertex u, Vertex v) const { return (points.row(u) - points.row(v)).squaredNorm(); }
};

/// Smallest per-row relative budget handed to expm_multiply.
inline constexpr double kMinRowDelta = 1e-13;

/// Each row gets budget delta / max(1, ||Q||_F), floored at kMinRowDelta. When
/// the floor applies, the returned config.delta is the larger effective value.
HeatKernelSketch heat_sketch(const Graph& g, const HeatKernelConfig& cfg,
                             const ExpmOptions& opts = {});

/// Binary sidecar: magic "WCSKETCH", u32 version, u64 n, u64 sketch_dim,
/// u64 seed, f64 t, f64 delta, f64 epsilon, f64 pad, then n*(sketch_dim+1)
/// f64 values row-major, all little-endian host order.
void write_sketch(std::ostream& out, const HeatKernelSketch& sketch);
HeatKernelSketch read_sketch(std::istream& in);

}  // namespace wellclust
