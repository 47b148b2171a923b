#include <algorithm>
#include <cstdio>

#include "scriptdiar/cluster.hpp"
#include "scriptdiar/segmentation.hpp"

namespace scriptdiar {

std::string cluster_name(int j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%02d", j);
  return buf;
}

SpectralFrontEnd spectral_front_end(const EmbeddingSet& embeddings, const DiarizeParams& params,
                                    int min_eigenpairs) {
  embeddings.validate();
  const auto n = static_cast<int>(embeddings.size());
  if (n < 2) throw InputError("diarization needs at least two sub-segments");

  SpectralFrontEnd front;
  front.k_max = params.k_max > 0 ? std::min(params.k_max, n - 1) : std::min(n - 1, 100);
  const int count = std::min(n, std::max(front.k_max + 1, min_eigenpairs));

  const AffinityMatrix refined = refine(cosine_affinity(embeddings), params.refine);
  front.spectrum = eigendecompose(refined, count);
  front.k_tilde = estimate_k(front.spectrum.eigenvalues, front.k_max);
  return front;
}

namespace {

Eigen::MatrixXd embed_points(const SpectralFrontEnd& front, int k, const DiarizeParams& params) {
  if (k > front.spectrum.k()) {
    throw InputError("k = " + std::to_string(k) + " needs more eigenpairs than the " +
                     std::to_string(front.spectrum.k()) + " computed");
  }
  Eigen::MatrixXd points = spectral_embed(front.spectrum, k).vectors;
  return params.normalize_rows ? normalize_rows(points) : points;
}

}  // namespace

Diarization diarize_unsupervised(const EmbeddingSet& embeddings, const DiarizeParams& params,
                                 std::optional<int> k_override, std::uint64_t seed) {
  const SpectralFrontEnd front = spectral_front_end(embeddings, params, k_override.value_or(0));
  return diarize_unsupervised(embeddings, front, params, k_override, seed);
}

Diarization diarize_unsupervised(const EmbeddingSet& embeddings, const SpectralFrontEnd& front,
                                 const DiarizeParams& params, std::optional<int> k_override,
                                 std::uint64_t seed) {
  const int k = k_override.value_or(front.k_tilde);
  if (k < 1 || static_cast<std::size_t>(k) > embeddings.size()) {
    throw InputError("cluster count " + std::to_string(k) + " is outside 1..n");
  }
  Diarization out;
  out.clusters = kmeans(embed_points(front, k, params), k, seed, params.kmeans);
  out.clusters.k_tilde = front.k_tilde;
  out.clusters.k_prime = 0;

  std::vector<std::string> names;
  for (int j = 1; j <= k; ++j) names.push_back(cluster_name(j));
  out.timeline = labels_to_timeline(embeddings.subsegments, out.clusters.labels, names);
  return out;
}

Diarization diarize_semisupervised(const EmbeddingSet& embeddings, const PseudoLabeling& pseudo,
                                   const DiarizeParams& params, std::uint64_t seed) {
  const SpectralFrontEnd front = spectral_front_end(embeddings, params, pseudo.k_prime());
  return diarize_semisupervised(embeddings, front, pseudo, params, seed);
}

Diarization diarize_semisupervised(const EmbeddingSet& embeddings, const SpectralFrontEnd& front,
                                   const PseudoLabeling& pseudo, const DiarizeParams& params,
                                   std::uint64_t seed) {
  if (pseudo.labels.size() != embeddings.size()) {
    throw InputError("pseudo labels cover " + std::to_string(pseudo.labels.size()) +
                     " sub-segments but there are " + std::to_string(embeddings.size()));
  }
  const int k = std::max(front.k_tilde, pseudo.k_prime());
  Diarization out;
  out.clusters = constrained_kmeans(embed_points(front, k, params), pseudo, front.k_tilde, seed, params.kmeans);

  std::vector<std::string> names;
  for (int j = 1; j <= k; ++j) {
    names.push_back(j <= pseudo.k_prime() ? pseudo.names[static_cast<std::size_t>(j - 1)] : cluster_name(j));
  }
  out.timeline = labels_to_timeline(embeddings.subsegments, out.clusters.labels, names);
  return out;
}

}  // namespace scriptdiar
