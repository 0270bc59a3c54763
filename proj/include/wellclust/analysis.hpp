#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "wellclust/graph.hpp"
#include "wellclust/spectral.hpp"

namespace wellclust {

/// Gap quantities measured against a reference partition. rho_upper is the
/// reference partition's max conductance, which upper-bounds rho(k); the
/// reported upsilon is lambda_{k+1} / rho_upper, i.e. the gap as seen by the
/// reference partition. Infinity marks a zero conductance.
struct GapReport {
  int k = 0;
  double lambda_k = 0.0;
  double lambda_k1 = 0.0;
  std::vector<double> per_cluster_conductance;
  double rho_upper = 0.0;
  double upsilon_lower = 0.0;
  std::vector<double> per_cluster_upsilon;
};

/// Needs eig.k() >= ref.k() + 1. Throws DomainError on an empty cluster.
GapReport gap_report(const Graph& g, const EigenPairs& eig, const Partition& ref);

struct StructureReport {
  Eigen::MatrixXd alpha_matrix;  ///< A(j, i) = <gbar_i, f_j>
  Eigen::MatrixXd beta_matrix;   ///< B = A^-1; column i is beta^(i)
  double condition = 0.0;        ///< 2-norm condition number of A
  double gram_min_eigenvalue = 0.0;  ///< smallest eigenvalue of A^T A
  std::vector<double> part1_residuals;  ///< ||gbar_i - fhat_i||^2
  std::vector<double> part1_bounds;     ///< phi(S_i) / lambda_{k+1}
  std::vector<double> part2_residuals;  ///< ||f_i - ghat_i||^2
  double part2_bound = 0.0;             ///< 1.1 k / upsilon_lower
  double zeta_observed = 0.0;  ///< min over row pairs of max over columns |B(l,i) - B(j,i)|
  double reconstruction_error = 0.0;  ///< max_i ||f_i - sum_j B(j,i) fhat_j||
};

inline constexpr double kMaxStructureCondition = 1e8;

/// Uses the first ref.k() eigenpairs. Throws DegenerateStructure when
/// cond(A) exceeds kMaxStructureCondition.
StructureReport structure_report(const Graph& g, const EigenPairs& eig, const Partition& ref,
                                 const GapReport& gap);

struct ApproximateCenters {
  Eigen::MatrixXd centers;  ///< k x k, row i is p^(i) = B.row(i) / sqrt(vol(S_i))
  double cost_sum = 0.0;    ///< sum_i sum_{u in S_i} d_u ||F(u) - p^(i)||^2
  double cost_bound = 0.0;  ///< 1.1 k^2 / upsilon_lower
  std::vector<double> scaled_norms;  ///< ||p^(i)||^2 vol(S_i)
  double separation = 0.0;  ///< min_{i != j} ||p^(i) - p^(j)||^2 min(vol(S_i), vol(S_j))
  double separation_bound = 0.0;  ///< zeta_observed^2 / 10
};

ApproximateCenters approximate_centers(const Graph& g, const EigenPairs& eig, const Partition& ref,
                                       const StructureReport& sr, const GapReport& gap);

struct CoreReport {
  double alpha_param = 0.0;
  Eigen::MatrixXd centers;
  std::vector<double> center_norms;  ///< ||p^(i)||^2 vol(S_i)
  std::vector<double> radii;         ///< R_i = alpha E_i / vol(S_i)
  std::vector<char> core_membership;
  std::vector<double> core_volume_fraction;
  std::vector<double> core_mass;  ///< sum over CORE_i of d_u ||F(u)||^2
  double escape_mass = 0.0;       ///< sum over S_i \ CORE_i of d_u ||F(u)||^2
};

/// ceil(N ln N) with N the SeedAndTrim sample count for k.
double default_core_alpha(int k);

/// Throws DomainError when alpha <= 1.
CoreReport core_report(const Graph& g, const SpectralEmbedding& emb, const Partition& ref,
                       const Eigen::MatrixXd& centers, double alpha);

struct MatchReport {
  std::vector<int> permutation;  ///< found cluster i is matched to ref cluster permutation[i]
  std::vector<double> symmetric_difference;  ///< vol(A_i xor S_perm(i))
  std::vector<double> fraction;              ///< symmetric_difference / vol(S_perm(i))
  double max_fraction = 0.0;
};

/// Optimal assignment maximizing total overlap volume. Throws DomainError if
/// the cluster counts differ.
MatchReport match_partitions(const Graph& g, const Partition& found, const Partition& ref);

/// Minimum-cost perfect assignment on a square matrix; returns column of each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

nlohmann::json quality_report(const Graph& g, const Partition& found,
                              const Partition* ref = nullptr);

/// Finite values as numbers, infinities as the strings "inf" / "-inf", NaN as null.
nlohmann::json json_number(double x);

nlohmann::json to_json(const GapReport& r);
nlohmann::json to_json(const StructureReport& r);
nlohmann::json to_json(const ApproximateCenters& r);
nlohmann::json to_json(const CoreReport& r);
nlohmann::json to_json(const MatchReport& r);
nlohmann::json to_json(const EigenPairs& eig);

/// Hypothesis thresholds for the gated checks.
inline constexpr double kPart2GapFactor = 20.0;     ///< upsilon >= 20 k^2
inline constexpr double kSeparationGapFactor = 100.0;  ///< upsilon >= 100 k^3

struct CertifyOptions {
  EigenSolverOptions eig;
  std::optional<double> core_alpha;
  double slack = 1e-9;
};

struct Certification {
  nlohmann::json report;
  bool all_passed = true;
};

/// Gap, structure, center and core reports for ref plus one pass / fail /
/// not-applicable verdict per inequality. Throws DegenerateStructure.
Certification certify(const Graph& g, const Partition& ref, const CertifyOptions& opts = {});

}  // namespace wellclust
