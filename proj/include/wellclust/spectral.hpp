#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wellclust/graph.hpp"

namespace wellclust {

/// Bottom eigenpairs of the normalized Laplacian.
struct EigenPairs {
  std::vector<double> values;     ///< ascending, each in [0, 2]
  Eigen::MatrixXd vectors;        ///< n x k, orthonormal columns
  std::vector<double> residuals;  ///< ||L f_i - lambda_i f_i||

  int k() const noexcept { return static_cast<int>(values.size()); }
  bool complete() const noexcept { return vectors.rows() == vectors.cols(); }
};

struct EigenSolverOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  /// Graphs with at most this many vertices use the dense symmetric solver.
  int dense_threshold = 512;
  /// Lanczos restart cap; 0 means 50 * k * ln(n).
  int max_restarts = 0;
  /// Basis size of the block Lanczos solver; 0 picks max(40, 6k + 20), capped by n.
  int krylov_dim = 0;
};

/// The k smallest eigenpairs of the normalized Laplacian. Requires 1 <= k < n.
/// Disconnected graphs are accepted (a warning is logged to stderr). Throws
/// ConvergenceError carrying the best residuals if Lanczos stalls.
EigenPairs bottom_eigenpairs(const Graph& g, int k, const EigenSolverOptions& opts = {});

/// All n eigenpairs via the dense solver. Only for graphs with n <= 4096.
EigenPairs full_eigenpairs(const Graph& g);

/// Dense normalized Laplacian. Test- and oracle-scale helper.
Eigen::MatrixXd dense_normalized_laplacian(const Graph& g);

/// Per-vertex embedding F(u)_j = f_j(u) / sqrt(d_u).
struct SpectralEmbedding {
  Eigen::MatrixXd points;  ///< n x k, row u is F(u)
  std::vector<double> eigenvalues;

  int dim() const noexcept { return static_cast<int>(points.cols()); }
};

SpectralEmbedding spectral_embed(const Graph& g, const EigenPairs& eig);

/// Columns gbar_i = D^{1/2} g_i / ||D^{1/2} g_i|| for the clusters of p.
/// Throws DomainError on an empty cluster.
Eigen::MatrixXd normalized_indicators(const Graph& g, const Partition& p);

}  // namespace wellclust
