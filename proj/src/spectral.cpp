#include "wellclust/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "wellclust/errors.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {
namespace {

// Sign convention: the entry of largest magnitude (lowest index on ties) is positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[arg]) * (1.0 + 1e-12)) arg = i;
  }
  if (v[arg] < 0.0) v = -v;
}

double residual_norm(const Graph& g, const Eigen::VectorXd& v, double lambda) {
  return (normalized_laplacian_apply(g, v) - lambda * v).norm();
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    v.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
  }
}

Eigen::VectorXd random_unit(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v.normalized();
}

EigenPairs finish(const Graph& g, std::vector<double> values, Eigen::MatrixXd vectors) {
  EigenPairs out;
  const Eigen::Index k = vectors.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  out.vectors.resize(vectors.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.vectors.col(i) = vectors.col(order[i]);
    canonicalize_sign(out.vectors.col(i));
    const double lambda = std::clamp(values[order[i]], 0.0, 2.0);
    out.values.push_back(lambda);
    out.residuals.push_back(residual_norm(g, out.vectors.col(i), lambda));
  }
  return out;
}

EigenPairs dense_bottom(const Graph& g, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_normalized_laplacian(g));
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", {});
  }
  std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
  return finish(g, std::move(values), solver.eigenvectors().leftCols(k));
}

// Block Lanczos with thick restarts. The basis holds blocks of k vectors so
// that eigenvalues of multiplicity up to k are resolved; Ritz pairs come from
// a full Rayleigh-Ritz projection on the basis.
class KrylovBasis {
 public:
  KrylovBasis(const Graph& g, Eigen::Index n, Eigen::Index m, Rng& rng)
      : g_(g), v_(n, m), lv_(n, m), tmp_(n), rng_(rng) {}

  Eigen::Index cols() const noexcept { return cols_; }
  Eigen::Index capacity() const noexcept { return v_.cols(); }
  const Eigen::MatrixXd& v() const noexcept { return v_; }
  const Eigen::MatrixXd& lv() const noexcept { return lv_; }

  void append(Eigen::VectorXd x) {
    const double before = x.norm();
    orthogonalize(x, v_, cols_);
    // A vector (nearly) inside the span is replaced by a random direction.
    while (x.norm() <= 1e-10 * std::max(before, 1e-300)) {
      x = random_unit(rng_, v_.rows());
      orthogonalize(x, v_, cols_);
    }
    x.normalize();
    v_.col(cols_) = x;
    normalized_laplacian_apply(g_, v_.col(cols_), tmp_);
    lv_.col(cols_) = tmp_;
    ++cols_;
  }

  /// Replaces the basis by V Y and L V by (L V) Y.
  void compress(const Eigen::MatrixXd& y) {
    const Eigen::Index p = y.cols();
    const Eigen::MatrixXd nv = v_.leftCols(cols_) * y;
    const Eigen::MatrixXd nlv = lv_.leftCols(cols_) * y;
    v_.leftCols(p) = nv;
    lv_.leftCols(p) = nlv;
    cols_ = p;
  }

 private:
  const Graph& g_;
  Eigen::MatrixXd v_;
  Eigen::MatrixXd lv_;
  Eigen::VectorXd tmp_;
  Rng& rng_;
  Eigen::Index cols_ = 0;
};

EigenPairs lanczos_bottom(const Graph& g, int k, const EigenSolverOptions& opts) {
  const Eigen::Index n = g.num_vertices();
  const int cap = opts.max_restarts > 0
                      ? opts.max_restarts
                      : static_cast<int>(std::ceil(50.0 * k * std::log(static_cast<double>(n))));
  const Eigen::Index block = k;
  Eigen::Index dim = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(40, 6 * k + 20);
  dim = std::min<Eigen::Index>(std::max<Eigen::Index>(dim, 3 * block), n);
  const Eigen::Index keep = std::min<Eigen::Index>(dim - block, 2 * k + 8);

  Rng rng = make_rng(opts.seed, "lanczos");
  KrylovBasis basis(g, n, dim, rng);
  for (Eigen::Index i = 0; i < block; ++i) basis.append(random_unit(rng, n));

  std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  for (int cycle = 0; cycle < cap; ++cycle) {
    // Expand by L applied to the newest block until the basis is full.
    while (basis.cols() < basis.capacity()) {
      const Eigen::Index last = basis.cols() - block;
      const Eigen::Index add = std::min(block, basis.capacity() - basis.cols());
      for (Eigen::Index j = 0; j < add; ++j) basis.append(basis.lv().col(last + j));
    }
    const Eigen::Index m = basis.cols();
    Eigen::MatrixXd h = basis.v().leftCols(m).transpose() * basis.lv().leftCols(m);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(h);
    const Eigen::MatrixXd y = rr.eigenvectors();
    const Eigen::VectorXd theta = rr.eigenvalues();

    const Eigen::MatrixXd x = basis.v().leftCols(m) * y.leftCols(k);
    const Eigen::MatrixXd lx = basis.lv().leftCols(m) * y.leftCols(k);
    bool done = true;
    for (int i = 0; i < k; ++i) {
      const double res = (lx.col(i) - theta[i] * x.col(i)).norm();
      best[i] = std::min(best[i], res);
      done &= res <= opts.tol;
    }
    if (done || m == n) {
      std::vector<double> values(theta.data(), theta.data() + k);
      EigenPairs out = finish(g, std::move(values), x);
      bool ok = true;
      for (double r : out.residuals) ok &= r <= opts.tol;
      if (ok) return out;
    }
    if (m == n) break;

    // Continue the Krylov sequence from L times the newest block, then keep
    // only the leading Ritz vectors.
    Eigen::MatrixXd next = basis.lv().middleCols(m - block, block);
    for (Eigen::Index j = 0; j < block; ++j) {
      Eigen::VectorXd c = next.col(j);
      orthogonalize(c, basis.v(), m);
      next.col(j) = c;
    }
    basis.compress(y.leftCols(keep));
    for (Eigen::Index j = 0; j < block; ++j) basis.append(next.col(j));
  }
  throw ConvergenceError("block Lanczos did not converge within " + std::to_string(cap) + " restarts",
                         best);
}

}  // namespace

Eigen::MatrixXd dense_normalized_laplacian(const Graph& g) {
  const Vertex n = g.num_vertices();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (Vertex u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      l(u, nb[i]) -= w[i] * g.inv_sqrt_degree(u) * g.inv_sqrt_degree(nb[i]);
    }
  }
  return l;
}

EigenPairs bottom_eigenpairs(const Graph& g, int k, const EigenSolverOptions& opts) {
  const Vertex n = g.num_vertices();
  if (k < 1 || k >= n) {
    throw DomainError("bottom_eigenpairs needs 1 <= k < n (k = " + std::to_string(k) +
                      ", n = " + std::to_string(n) + ")");
  }
  int components = 1;
  connected_components(g, &components);
  if (components > 1) {
    std::cerr << "warning: graph has " << components
              << " connected components; eigenvalue 0 has multiplicity " << components << '\n';
  }
  if (n <= opts.dense_threshold) return dense_bottom(g, k);
  return lanczos_bottom(g, k, opts);
}

EigenPairs full_eigenpairs(const Graph& g) {
  if (g.num_vertices() > 4096) {
    throw DomainError("full spectrum requested for n = " + std::to_string(g.num_vertices()) +
                      " (limit 4096)");
  }
  return dense_bottom(g, g.num_vertices());
}

SpectralEmbedding spectral_embed(const Graph& g, const EigenPairs& eig) {
  if (eig.vectors.rows() != g.num_vertices()) {
    throw DomainError("eigenpairs were computed on a different graph");
  }
  SpectralEmbedding emb;
  emb.points = eig.vectors;
  for (Vertex u = 0; u < g.num_vertices(); ++u) emb.points.row(u) *= g.inv_sqrt_degree(u);
  emb.eigenvalues = eig.values;
  return emb;
}

Eigen::MatrixXd normalized_indicators(const Graph& g, const Partition& p) {
  p.require_nonempty();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.num_vertices(), p.k());
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    const int c = p.cluster_of(u);
    out(u, c) = std::sqrt(g.degree(u) / p.cluster_volume(c));
  }
  return out;
}

}  // namespace wellclust
