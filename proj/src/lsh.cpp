#include "wellclust/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wellclust/errors.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {

int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (centers.row(c) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

CenterIndex::CenterIndex(Eigen::MatrixXd centers, const LshOptions& opts)
    : centers_(std::move(centers)), hashes_(opts.hashes_per_table), tables_(opts.tables) {
  if (centers_.rows() < 1) throw DomainError("LSH index needs at least one center");
  if (hashes_ < 1 || tables_ < 1) throw DomainError("LSH needs at least one table and hash");
  const Eigen::Index k = centers_.rows();
  center_dist_.resize(k, k);
  std::vector<double> pair;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      center_dist_(i, j) = (centers_.row(i) - centers_.row(j)).norm();
      if (i < j) pair.push_back(center_dist_(i, j));
    }
  }
  width_ = opts.width;
  if (width_ <= 0.0) {
    if (!pair.empty()) {
      std::nth_element(pair.begin(), pair.begin() + pair.size() / 2, pair.end());
      width_ = 2.0 * pair[pair.size() / 2];
    }
    if (!(width_ > 0.0)) width_ = 1.0;
  }

  Rng rng = make_rng(opts.seed, "lsh");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, width_);
  const int total = tables_ * hashes_;
  proj_.resize(centers_.cols(), total);
  offset_.resize(total);
  for (int h = 0; h < total; ++h) {
    for (Eigen::Index d = 0; d < centers_.cols(); ++d) proj_(d, h) = normal(rng);
    offset_[h] = uniform(rng);
  }
  buckets_.resize(static_cast<std::size_t>(tables_));
  for (int t = 0; t < tables_; ++t) {
    for (Eigen::Index c = 0; c < k; ++c) {
      buckets_[t][bucket(t, centers_.row(c))].push_back(static_cast<int>(c));
    }
  }
}

std::uint64_t CenterIndex::bucket(int table, const Eigen::Ref<const Eigen::RowVectorXd>& point) const {
  std::uint64_t key = 0x84222325cbf29ce4ULL;
  for (int h = 0; h < hashes_; ++h) {
    const int col = table * hashes_ + h;
    const double v = (point.dot(proj_.col(col).transpose()) + offset_[col]) / width_;
    key = mix64(key ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(v))));
  }
  return key;
}

int CenterIndex::query(const Eigen::Ref<const Eigen::RowVectorXd>& point, double eps) const {
  const int k = size();
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](int c) {
    if (seen[c]) return;
    seen[c] = 1;
    const double d = (centers_.row(c) - point).norm();
    if (d < best_d || (d == best_d && c < best)) {
      best_d = d;
      best = c;
    }
  };
  for (int t = 0; t < tables_; ++t) {
    auto it = buckets_[t].find(bucket(t, point));
    if (it == buckets_[t].end()) continue;
    for (int c : it->second) consider(c);
  }
  if (best < 0) return nearest_center(centers_, point);

  // Any unseen c has ||x - c|| >= ||c - best|| - best_d; it can beat the
  // (1 + eps) guarantee only if that lower bound is below best_d / (1 + eps).
  const int anchor = best;
  const double anchor_d = best_d;
  for (int c = 0; c < k; ++c) {
    if (seen[c]) continue;
    if (center_dist_(anchor, c) - anchor_d < anchor_d / (1.0 + eps)) consider(c);
  }
  return best;
}

}  // namespace wellclust
