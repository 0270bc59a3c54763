#include "wellclust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wellclust/cluster.hpp"
#include "wellclust/errors.hpp"

namespace wellclust {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_or_inf(double num, double den) { return den > 0.0 ? num / den : kInf; }

// Per-cluster boundary / volume; also valid for k = 1 where the cluster is V.
std::vector<double> reference_conductances(const Graph& g, const Partition& p) {
  p.require_nonempty();
  std::vector<double> cut(static_cast<std::size_t>(p.k()), 0.0);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (p.cluster_of(nb[i]) != p.cluster_of(u)) cut[p.cluster_of(u)] += w[i];
    }
  }
  for (int i = 0; i < p.k(); ++i) cut[i] /= p.cluster_volume(i);
  return cut;
}

nlohmann::json vec_json(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json_number(m(r, c)));
    out.push_back(row);
  }
  return out;
}

nlohmann::json verdict(const std::string& name, bool applicable, double value, double bound,
                       double slack, const std::string& hypothesis, bool& all_passed,
                       bool lower = false) {
  nlohmann::json j;
  j["check"] = name;
  j["value"] = json_number(value);
  j["bound"] = json_number(bound);
  j["hypothesis"] = hypothesis;
  if (!applicable) {
    j["status"] = "not-applicable";
    return j;
  }
  const bool ok = lower ? value >= bound - slack : value <= bound + slack;
  j["margin"] = json_number(lower ? value - bound : bound - value);
  j["status"] = ok ? "pass" : "fail";
  if (!ok) all_passed = false;
  return j;
}

}  // namespace

nlohmann::json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

GapReport gap_report(const Graph& g, const EigenPairs& eig, const Partition& ref) {
  const int k = ref.k();
  if (eig.k() < k + 1) throw DomainError("gap_report needs lambda_1 .. lambda_{k+1}");
  GapReport r;
  r.k = k;
  r.lambda_k = eig.values[k - 1];
  r.lambda_k1 = eig.values[k];
  r.per_cluster_conductance = reference_conductances(g, ref);
  r.rho_upper = *std::max_element(r.per_cluster_conductance.begin(), r.per_cluster_conductance.end());
  r.upsilon_lower = ratio_or_inf(r.lambda_k1, r.rho_upper);
  for (double phi : r.per_cluster_conductance) r.per_cluster_upsilon.push_back(ratio_or_inf(r.lambda_k1, phi));
  return r;
}

StructureReport structure_report(const Graph& g, const EigenPairs& eig, const Partition& ref,
                                 const GapReport& gap) {
  const int k = ref.k();
  if (eig.k() < k) throw DomainError("structure_report needs k eigenpairs");
  const Eigen::MatrixXd f = eig.vectors.leftCols(k);
  const Eigen::MatrixXd gbar = normalized_indicators(g, ref);

  StructureReport r;
  r.alpha_matrix = f.transpose() * gbar;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.alpha_matrix);
  const auto& sv = svd.singularValues();
  r.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : kInf;
  if (!(r.condition <= kMaxStructureCondition)) {
    throw DegenerateStructure("indicator/eigenvector coefficient matrix is singular (cond = " +
                                  std::to_string(r.condition) + ")",
                              r.condition);
  }
  r.beta_matrix = r.alpha_matrix.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(r.alpha_matrix.transpose() * r.alpha_matrix,
                                                      Eigen::EigenvaluesOnly);
  r.gram_min_eigenvalue = gram.eigenvalues()[0];

  const Eigen::MatrixXd fhat = f * r.alpha_matrix;
  const Eigen::MatrixXd ghat = gbar * r.beta_matrix;
  for (int i = 0; i < k; ++i) {
    r.part1_residuals.push_back((gbar.col(i) - fhat.col(i)).squaredNorm());
    r.part1_bounds.push_back(gap.per_cluster_conductance[i] / gap.lambda_k1);
    r.part2_residuals.push_back((f.col(i) - ghat.col(i)).squaredNorm());
    r.reconstruction_error =
        std::max(r.reconstruction_error, (f.col(i) - fhat * r.beta_matrix.col(i)).norm());
  }
  r.part2_bound = std::isinf(gap.upsilon_lower) ? 0.0 : 1.1 * k / gap.upsilon_lower;

  r.zeta_observed = k > 1 ? kInf : 0.0;
  for (int l = 0; l < k; ++l) {
    for (int j = l + 1; j < k; ++j) {
      const double spread = (r.beta_matrix.row(l) - r.beta_matrix.row(j)).cwiseAbs().maxCoeff();
      r.zeta_observed = std::min(r.zeta_observed, spread);
    }
  }
  return r;
}

ApproximateCenters approximate_centers(const Graph& g, const EigenPairs& eig, const Partition& ref,
                                       const StructureReport& sr, const GapReport& gap) {
  const int k = ref.k();
  ApproximateCenters out;
  out.centers = sr.beta_matrix;
  for (int i = 0; i < k; ++i) out.centers.row(i) /= std::sqrt(ref.cluster_volume(i));

  EigenPairs head{std::vector<double>(eig.values.begin(), eig.values.begin() + k),
                  eig.vectors.leftCols(k), {}};
  const SpectralEmbedding emb = spectral_embed(g, head);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    out.cost_sum += g.degree(u) * (emb.points.row(u) - out.centers.row(ref.cluster_of(u))).squaredNorm();
  }
  out.cost_bound = std::isinf(gap.upsilon_lower) ? 0.0 : 1.1 * k * k / gap.upsilon_lower;
  for (int i = 0; i < k; ++i) {
    out.scaled_norms.push_back(out.centers.row(i).squaredNorm() * ref.cluster_volume(i));
  }
  out.separation = k > 1 ? kInf : 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double d = (out.centers.row(i) - out.centers.row(j)).squaredNorm() *
                       std::min(ref.cluster_volume(i), ref.cluster_volume(j));
      out.separation = std::min(out.separation, d);
    }
  }
  out.separation_bound = sr.zeta_observed * sr.zeta_observed / 10.0;
  return out;
}

double default_core_alpha(int k) {
  const double n = seed_sample_count(k);
  return std::ceil(n * std::log(n));
}

CoreReport core_report(const Graph& g, const SpectralEmbedding& emb, const Partition& ref,
                       const Eigen::MatrixXd& centers, double alpha) {
  if (!(alpha > 1.0)) throw DomainError("core_report needs alpha > 1");
  const int k = ref.k();
  if (centers.rows() != k || centers.cols() != emb.dim()) throw DomainError("center shape mismatch");
  CoreReport r;
  r.alpha_param = alpha;
  r.centers = centers;
  std::vector<double> spread(static_cast<std::size_t>(k), 0.0);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    spread[ref.cluster_of(u)] += g.degree(u) * (emb.points.row(u) - centers.row(ref.cluster_of(u))).squaredNorm();
  }
  for (int i = 0; i < k; ++i) {
    r.center_norms.push_back(centers.row(i).squaredNorm() * ref.cluster_volume(i));
    r.radii.push_back(alpha * spread[i] / ref.cluster_volume(i));
  }
  r.core_membership.assign(static_cast<std::size_t>(g.num_vertices()), 0);
  r.core_volume_fraction.assign(static_cast<std::size_t>(k), 0.0);
  r.core_mass.assign(static_cast<std::size_t>(k), 0.0);
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    const int i = ref.cluster_of(u);
    const double d2 = (emb.points.row(u) - centers.row(i)).squaredNorm();
    // Rounding slack so that exact-point clusters (E_i = 0) are all core.
    const double slack = 1e-9 * centers.row(i).squaredNorm();
    const double mass = g.degree(u) * emb.points.row(u).squaredNorm();
    if (d2 <= r.radii[i] + slack) {
      r.core_membership[u] = 1;
      r.core_volume_fraction[i] += g.degree(u);
      r.core_mass[i] += mass;
    } else {
      r.escape_mass += mass;
    }
  }
  for (int i = 0; i < k; ++i) r.core_volume_fraction[i] /= ref.cluster_volume(i);
  return r;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // Hungarian algorithm with potentials, O(k^3).
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DomainError("assignment needs a square matrix");
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

MatchReport match_partitions(const Graph& g, const Partition& found, const Partition& ref) {
  if (found.k() != ref.k()) {
    throw DomainError("cannot match " + std::to_string(found.k()) + " clusters against " +
                      std::to_string(ref.k()));
  }
  if (found.num_vertices() != g.num_vertices() || ref.num_vertices() != g.num_vertices()) {
    throw DomainError("partitions do not cover this graph");
  }
  const int k = ref.k();
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(k, k);
  for (Vertex u = 0; u < g.num_vertices(); ++u) overlap(found.cluster_of(u), ref.cluster_of(u)) += g.degree(u);
  MatchReport r;
  r.permutation = solve_assignment(-overlap);
  for (int i = 0; i < k; ++i) {
    const int j = r.permutation[i];
    const double sym = found.cluster_volume(i) + ref.cluster_volume(j) - 2.0 * overlap(i, j);
    r.symmetric_difference.push_back(sym);
    r.fraction.push_back(sym / ref.cluster_volume(j));
    r.max_fraction = std::max(r.max_fraction, r.fraction.back());
  }
  return r;
}

nlohmann::json quality_report(const Graph& g, const Partition& found, const Partition* ref) {
  nlohmann::json j;
  j["k"] = found.k();
  j["vertices"] = g.num_vertices();
  j["edges"] = g.num_edges();
  j["cluster_sizes"] = nlohmann::json::array();
  j["cluster_volumes"] = vec_json(found.cluster_volumes());
  for (int i = 0; i < found.k(); ++i) j["cluster_sizes"].push_back(found.cluster_size(i));
  if (found.has_empty_cluster()) {
    j["empty_clusters"] = true;
  } else {
    const auto phi = reference_conductances(g, found);
    double sum = 0.0;
    for (double x : phi) sum += x;
    j["conductance"] = vec_json(phi);
    j["max_conductance"] = json_number(*std::max_element(phi.begin(), phi.end()));
    j["sum_conductance"] = json_number(sum);
  }
  if (ref != nullptr) {
    const MatchReport m = match_partitions(g, found, *ref);
    j["matching"] = to_json(m);
    const auto ref_phi = reference_conductances(g, *ref);
    const double ref_max = *std::max_element(ref_phi.begin(), ref_phi.end());
    j["reference_max_conductance"] = json_number(ref_max);
    if (j.contains("max_conductance") && j["max_conductance"].is_number()) {
      j["conductance_ratio"] = json_number(ratio_or_inf(j["max_conductance"].get<double>(), ref_max));
    }
  }
  return j;
}

nlohmann::json to_json(const GapReport& r) {
  return {{"k", r.k},
          {"lambda_k", r.lambda_k},
          {"lambda_k1", r.lambda_k1},
          {"per_cluster_conductance", vec_json(r.per_cluster_conductance)},
          {"rho_upper", json_number(r.rho_upper)},
          {"upsilon_lower", json_number(r.upsilon_lower)},
          {"per_cluster_upsilon", vec_json(r.per_cluster_upsilon)},
          {"note", "rho_upper and upsilon_lower are measured on the reference partition"}};
}

nlohmann::json to_json(const StructureReport& r) {
  return {{"alpha_matrix", mat_json(r.alpha_matrix)},
          {"beta_matrix", mat_json(r.beta_matrix)},
          {"condition", json_number(r.condition)},
          {"gram_min_eigenvalue", r.gram_min_eigenvalue},
          {"part1_residuals", vec_json(r.part1_residuals)},
          {"part1_bounds", vec_json(r.part1_bounds)},
          {"part2_residuals", vec_json(r.part2_residuals)},
          {"part2_bound", json_number(r.part2_bound)},
          {"zeta_observed", json_number(r.zeta_observed)},
          {"reconstruction_error", r.reconstruction_error}};
}

nlohmann::json to_json(const ApproximateCenters& r) {
  return {{"centers", mat_json(r.centers)},
          {"cost_sum", r.cost_sum},
          {"cost_bound", json_number(r.cost_bound)},
          {"scaled_norms", vec_json(r.scaled_norms)},
          {"separation", json_number(r.separation)},
          {"separation_bound", json_number(r.separation_bound)}};
}

nlohmann::json to_json(const CoreReport& r) {
  std::size_t members = 0;
  for (char c : r.core_membership) members += c ? 1 : 0;
  return {{"alpha", r.alpha_param},
          {"center_norms", vec_json(r.center_norms)},
          {"radii", vec_json(r.radii)},
          {"core_vertices", members},
          {"core_volume_fraction", vec_json(r.core_volume_fraction)},
          {"core_mass", vec_json(r.core_mass)},
          {"escape_mass", r.escape_mass}};
}

nlohmann::json to_json(const MatchReport& r) {
  return {{"permutation", r.permutation},
          {"symmetric_difference", vec_json(r.symmetric_difference)},
          {"fraction", vec_json(r.fraction)},
          {"max_fraction", r.max_fraction}};
}

nlohmann::json to_json(const EigenPairs& eig) {
  return {{"k", eig.k()}, {"values", eig.values}, {"residuals", eig.residuals}};
}

Certification certify(const Graph& g, const Partition& ref, const CertifyOptions& opts) {
  const int k = ref.k();
  const EigenPairs eig = bottom_eigenpairs(g, k + 1, opts.eig);
  const GapReport gap = gap_report(g, eig, ref);
  const StructureReport sr = structure_report(g, eig, ref, gap);
  const ApproximateCenters ac = approximate_centers(g, eig, ref, sr, gap);
  EigenPairs head{std::vector<double>(eig.values.begin(), eig.values.begin() + k),
                  eig.vectors.leftCols(k), {}};
  const double alpha = opts.core_alpha ? *opts.core_alpha : default_core_alpha(k);
  const CoreReport cr = core_report(g, spectral_embed(g, head), ref, ac.centers, alpha);

  Certification c;
  const double kk = k;
  const bool part2_ok = gap.upsilon_lower >= kPart2GapFactor * kk * kk;
  const bool sep_ok = gap.upsilon_lower >= kSeparationGapFactor * kk * kk * kk;
  const std::string part2_hyp = "upsilon_lower >= 20 k^2";
  const std::string sep_hyp = "upsilon_lower >= 100 k^3";
  nlohmann::json checks = nlohmann::json::array();
  for (int i = 0; i < k; ++i) {
    checks.push_back(verdict("part1[" + std::to_string(i) + "]", true, sr.part1_residuals[i],
                             sr.part1_bounds[i], opts.slack, "none", c.all_passed));
  }
  for (int i = 0; i < k; ++i) {
    checks.push_back(verdict("part2[" + std::to_string(i) + "]", part2_ok, sr.part2_residuals[i],
                             sr.part2_bound, opts.slack, part2_hyp, c.all_passed));
  }
  checks.push_back(verdict("gram_min_eigenvalue", part2_ok, sr.gram_min_eigenvalue,
                           std::isinf(gap.upsilon_lower) ? 1.0 : 1.0 - kk / gap.upsilon_lower,
                           opts.slack, part2_hyp, c.all_passed, true));
  checks.push_back(verdict("center_cost", part2_ok, ac.cost_sum, ac.cost_bound, opts.slack,
                           part2_hyp, c.all_passed));
  for (int i = 0; i < k; ++i) {
    checks.push_back(verdict("center_norm_low[" + std::to_string(i) + "]", part2_ok,
                             ac.scaled_norms[i], 0.9, opts.slack, part2_hyp, c.all_passed, true));
    checks.push_back(verdict("center_norm_high[" + std::to_string(i) + "]", part2_ok,
                             ac.scaled_norms[i], 1.1, opts.slack, part2_hyp, c.all_passed));
  }
  checks.push_back(verdict("center_separation", part2_ok && k > 1, ac.separation,
                           ac.separation_bound, opts.slack, part2_hyp, c.all_passed, true));
  checks.push_back(verdict("zeta", sep_ok && k > 1, sr.zeta_observed, 1.0 / (10.0 * std::sqrt(kk)),
                           opts.slack, sep_hyp, c.all_passed, true));
  for (int i = 0; i < k; ++i) {
    checks.push_back(verdict("core_volume[" + std::to_string(i) + "]", true,
                             cr.core_volume_fraction[i], 1.0 - 1.0 / alpha, opts.slack, "none",
                             c.all_passed, true));
  }

  c.report["eigenpairs"] = to_json(eig);
  c.report["gap"] = to_json(gap);
  c.report["structure"] = to_json(sr);
  c.report["centers"] = to_json(ac);
  c.report["cores"] = to_json(cr);
  c.report["checks"] = checks;
  c.report["all_passed"] = c.all_passed;
  return c;
}

}  // namespace wellclust
