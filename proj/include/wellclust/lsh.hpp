#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace wellclust {

struct LshOptions {
  int hashes_per_table = 2;
  int tables = 8;
  /// Bucket width; 0 means twice the median pairwise distance between centers.
  double width = 0.0;
  std::uint64_t seed = 0;
};

/// Euclidean (p-stable) LSH index over a small set of centers.
///
/// Queries return a center within (1 + eps) of the nearest one. Candidates
/// come from the hash buckets; centers outside the candidate set are ruled out
/// with the triangle inequality against the best candidate and evaluated
/// exactly only when that bound is inconclusive. An empty candidate set falls
/// back to an exact scan.
class CenterIndex {
 public:
  CenterIndex(Eigen::MatrixXd centers, const LshOptions& opts = {});

  /// Index of an approximate nearest center; ties go to the lower index.
  int query(const Eigen::Ref<const Eigen::RowVectorXd>& point, double eps) const;

  int size() const noexcept { return static_cast<int>(centers_.rows()); }
  double width() const noexcept { return width_; }

 private:
  std::uint64_t bucket(int table, const Eigen::Ref<const Eigen::RowVectorXd>& point) const;

  Eigen::MatrixXd centers_;
  Eigen::MatrixXd center_dist_;  // pairwise Euclidean distances
  int hashes_ = 0;
  int tables_ = 0;
  double width_ = 1.0;
  Eigen::MatrixXd proj_;        // dim x (tables * hashes)
  Eigen::RowVectorXd offset_;   // tables * hashes
  std::vector<std::unordered_map<std::uint64_t, std::vector<int>>> buckets_;
};

/// Nearest center by exhaustive scan; ties go to the lower index.
int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& point);

}  // namespace wellclust
