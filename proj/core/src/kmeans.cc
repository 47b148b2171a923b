#include <limits>
#include <random>
#include <string>

#include "scriptdiar/cluster.hpp"

namespace scriptdiar {

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::MatrixXd& centroids,
                        Eigen::Index j) {
  return (points.row(i) - centroids.row(j)).squaredNorm();
}

// Nearest centroid, 1-based; ties go to the lower index.
int nearest(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::MatrixXd& centroids,
            double* distance = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(points, i, centroids, j);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  if (distance != nullptr) *distance = best_d;
  return best + 1;
}

// Fills centroid rows [placed, k) by D^2 sampling over the points whose
// `eligible` flag is set, conditioned on the rows already placed.
void kmeanspp_seed(const Eigen::MatrixXd& points, const std::vector<char>& eligible, Eigen::MatrixXd& centroids,
                   Eigen::Index placed, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eligible[static_cast<std::size_t>(i)]) candidates.push_back(i);
  }
  if (candidates.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) candidates.push_back(i);
  }

  std::vector<double> d2(candidates.size(), std::numeric_limits<double>::infinity());
  auto update = [&](Eigen::Index row) {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      d2[c] = std::min(d2[c], squared_distance(points, candidates[c], centroids, row));
    }
  };
  for (Eigen::Index j = 0; j < placed; ++j) update(j);

  for (Eigen::Index j = placed; j < k; ++j) {
    double total = 0.0;
    if (j > 0) {
      for (double d : d2) total += d;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      pick = candidates.size() - 1;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        acc += d2[c];
        if (r < acc) {
          pick = c;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
    }
    centroids.row(j) = points.row(candidates[pick]);
    update(j);
  }
}

// M-step. An empty cluster is re-seeded at the movable point farthest from its
// nearest centroid.
void recompute_centroids(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                         const std::vector<char>& movable, Eigen::MatrixXd& centroids) {
  const Eigen::Index k = centroids.rows();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)] - 1;
    sums.row(l) += points.row(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  std::vector<Eigen::Index> empty;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) {
      empty.push_back(j);
    } else {
      centroids.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
  }
  for (Eigen::Index j : empty) {
    Eigen::Index farthest = -1;
    double farthest_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (!movable[static_cast<std::size_t>(i)]) continue;
      double d = 0.0;
      nearest(points, i, centroids, &d);
      if (d > farthest_d) {
        farthest_d = d;
        farthest = i;
      }
    }
    if (farthest >= 0) centroids.row(j) = points.row(farthest);
  }
}

}  // namespace

std::vector<std::size_t> ClusterResult::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) {
    if (l >= 1 && l <= k) ++sizes[static_cast<std::size_t>(l - 1)];
  }
  return sizes;
}

double within_cluster_ss(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                         const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += squared_distance(points, i, centroids, labels[static_cast<std::size_t>(i)] - 1);
  }
  return total;
}

ClusterResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw InputError("k must be at least 1");
  if (k > n) throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " points");
  if (options.max_iters < 1) throw InputError("max_iters must be at least 1");

  std::mt19937_64 rng(seed);
  const std::vector<char> all(static_cast<std::size_t>(n), 1);
  ClusterResult result;
  result.k = k;
  result.k_tilde = k;
  result.centroids.resize(k, points.cols());
  kmeanspp_seed(points, all, result.centroids, 0, rng);

  result.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < options.max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = nearest(points, i, result.centroids);
      if (l != result.labels[static_cast<std::size_t>(i)]) {
        result.labels[static_cast<std::size_t>(i)] = l;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;
    recompute_centroids(points, result.labels, all, result.centroids);
  }
  return result;
}

ClusterResult constrained_kmeans(const Eigen::MatrixXd& points, const PseudoLabeling& pseudo, int k_tilde,
                                 std::uint64_t seed, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (pseudo.labels.size() != static_cast<std::size_t>(n)) {
    throw InputError("pseudo label count does not match the number of points");
  }
  if (options.max_iters < 1) throw InputError("max_iters must be at least 1");
  const int k_prime = pseudo.k_prime();
  const int k = std::max(k_tilde, k_prime);
  if (k < 1) throw InputError("k must be at least 1");
  if (k > n) throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " points");

  // Centroids of the known speakers are the means of their labeled points.
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k_prime), 0);
  std::vector<char> movable(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = pseudo.labels[static_cast<std::size_t>(i)];
    if (l == 0) continue;
    if (l < 0 || l > k_prime) throw InputError("pseudo label " + std::to_string(l) + " outside 0..k'");
    centroids.row(l - 1) += points.row(i);
    ++counts[static_cast<std::size_t>(l - 1)];
    movable[static_cast<std::size_t>(i)] = 0;
  }
  for (int j = 0; j < k_prime; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) {
      throw InputError("pseudo label " + std::to_string(j + 1) + " has no labeled point");
    }
    centroids.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
  }

  std::mt19937_64 rng(seed);
  kmeanspp_seed(points, movable, centroids, k_prime, rng);

  ClusterResult result;
  result.k = k;
  result.k_tilde = k_tilde;
  result.k_prime = k_prime;
  result.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < options.max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int fixed = pseudo.labels[static_cast<std::size_t>(i)];
      const int l = fixed != 0 ? fixed : nearest(points, i, centroids);
      if (l != result.labels[static_cast<std::size_t>(i)]) {
        result.labels[static_cast<std::size_t>(i)] = l;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;
    recompute_centroids(points, result.labels, movable, centroids);
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace scriptdiar
