#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scriptdiar/types.hpp"

namespace scriptdiar {

/// Square affinity over sub-segments. Cosine affinities are exactly symmetric;
/// refined ones are row-max normalized and need not be.
struct AffinityMatrix {
  Eigen::MatrixXd values;

  Eigen::Index size() const { return values.rows(); }
};

/// Top eigenpairs of an affinity, descending. Row i of `vectors` is the
/// spectral embedding of sub-segment i.
struct SpectralEmbedding {
  Eigen::MatrixXd vectors;
  std::vector<double> eigenvalues;

  int k() const { return static_cast<int>(vectors.cols()); }
};

struct ClusterResult {
  /// 1-based cluster per point.
  std::vector<int> labels;
  /// Row j - 1 is the centroid of cluster j.
  Eigen::MatrixXd centroids;
  int k = 0;
  int k_tilde = 0;
  int k_prime = 0;
  int iterations = 0;

  std::vector<std::size_t> cluster_sizes() const;
};

struct RefineOptions {
  double threshold_percentile = 0.95;
  double threshold_factor = 0.01;
  bool row_threshold = true;  // R1
  bool symmetrize = true;     // R2
  bool diffuse = true;        // R3
  bool row_max_normalize = true;  // R4
};

struct KMeansOptions {
  int max_iters = 300;
};

struct DiarizeParams {
  RefineOptions refine;
  KMeansOptions kmeans;
  /// Upper bound on the eigen-gap search; 0 means min(n - 1, 100).
  int k_max = 0;
  /// Length-normalize spectral embedding rows before K-means.
  bool normalize_rows = true;
};

/// A_ij = cos(x_i, x_j), symmetrized by averaging with the transpose.
AffinityMatrix cosine_affinity(const EmbeddingSet& embeddings);
AffinityMatrix cosine_affinity(const Eigen::MatrixXd& embeddings);

/// Row percentile thresholding, max-symmetrization, diffusion A * A^T and
/// row-wise max normalization, each toggleable.
AffinityMatrix refine(const AffinityMatrix& affinity, const RefineOptions& options = {});

/// Top `count` eigenpairs of the symmetric part of `affinity`, in descending
/// order. Each eigenvector's first non-negligible component is positive.
SpectralEmbedding eigendecompose(const AffinityMatrix& affinity, int count);

/// Keeps the leading k eigenpairs.
SpectralEmbedding spectral_embed(const SpectralEmbedding& spectrum, int k);
SpectralEmbedding spectral_embed(const AffinityMatrix& affinity, int k);

/// Position of the largest gap lambda_j - lambda_{j+1} for j = 1..k_max; ties go
/// to the smaller j.
int estimate_k(const std::vector<double>& eigenvalues, int k_max);

/// Scales every non-zero row to unit length.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& points);

/// K-means++ seeding followed by Lloyd iterations.
ClusterResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                     const KMeansOptions& options = {});

/// K-means where pseudo-labeled points keep their labels and seed the first k'
/// centroids; k = max(k_tilde, k').
ClusterResult constrained_kmeans(const Eigen::MatrixXd& points, const PseudoLabeling& pseudo,
                                 int k_tilde, std::uint64_t seed, const KMeansOptions& options = {});

/// Within-cluster sum of squared distances.
double within_cluster_ss(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                         const Eigen::MatrixXd& centroids);

/// Shared spectral front end: refined affinity spectrum, reused across methods.
struct SpectralFrontEnd {
  SpectralEmbedding spectrum;
  int k_tilde = 0;
  int k_max = 0;
};

/// Runs affinity, refinement and eigendecomposition. At least
/// `min_eigenpairs` eigenpairs are kept (clamped to n).
SpectralFrontEnd spectral_front_end(const EmbeddingSet& embeddings, const DiarizeParams& params,
                                    int min_eigenpairs = 0);

struct Diarization {
  SpeakerTimeline timeline;
  ClusterResult clusters;
};

Diarization diarize_unsupervised(const EmbeddingSet& embeddings, const DiarizeParams& params,
                                 std::optional<int> k_override, std::uint64_t seed);
Diarization diarize_unsupervised(const EmbeddingSet& embeddings, const SpectralFrontEnd& front,
                                 const DiarizeParams& params, std::optional<int> k_override,
                                 std::uint64_t seed);

Diarization diarize_semisupervised(const EmbeddingSet& embeddings, const PseudoLabeling& pseudo,
                                   const DiarizeParams& params, std::uint64_t seed);
Diarization diarize_semisupervised(const EmbeddingSet& embeddings, const SpectralFrontEnd& front,
                                   const PseudoLabeling& pseudo, const DiarizeParams& params,
                                   std::uint64_t seed);

/// Name given to cluster j when no character name is known.
std::string cluster_name(int j);

}  // namespace scriptdiar
