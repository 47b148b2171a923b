#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <lapacke.h>

#include "quantile.hpp"
#include "scriptdiar/cluster.hpp"

namespace scriptdiar {

AffinityMatrix cosine_affinity(const EmbeddingSet& embeddings) {
  embeddings.validate();
  return cosine_affinity(embeddings.matrix);
}

AffinityMatrix cosine_affinity(const Eigen::MatrixXd& embeddings) {
  Eigen::MatrixXd unit = embeddings;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm == 0.0) throw InputError("embedding row " + std::to_string(i) + " has zero norm");
    unit.row(i) /= norm;
  }
  AffinityMatrix out;
  out.values.noalias() = unit * unit.transpose();
  const Eigen::MatrixXd transposed = out.values.transpose();
  out.values = 0.5 * (out.values + transposed);
  return out;
}

AffinityMatrix refine(const AffinityMatrix& affinity, const RefineOptions& options) {
  if (!(options.threshold_percentile > 0.0 && options.threshold_percentile < 1.0)) {
    throw InputError("threshold_percentile must be in (0, 1)");
  }
  if (!(options.threshold_factor >= 0.0 && options.threshold_factor <= 1.0)) {
    throw InputError("threshold_factor must be in [0, 1]");
  }
  Eigen::MatrixXd a = affinity.values;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw InputError("affinity matrix is not square");

  if (options.row_threshold && options.threshold_factor != 1.0) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = a(i, j);
      const double cut = detail::quantile(row, options.threshold_percentile);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (a(i, j) < cut) a(i, j) *= options.threshold_factor;
      }
    }
  }
  if (options.symmetrize) {
    const Eigen::MatrixXd transposed = a.transpose();
    a = a.cwiseMax(transposed);
  }
  if (options.diffuse) {
    Eigen::MatrixXd diffused(n, n);
    diffused.noalias() = a * a.transpose();
    a = std::move(diffused);
  }
  if (options.row_max_normalize) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double max = a.row(i).maxCoeff();
      if (!(max > 0.0)) {
        throw InputError("degenerate affinity: row " + std::to_string(i) +
                         " has no positive entry after refinement");
      }
      a.row(i) /= max;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((a.row(i).array() == 0.0).all()) {
        throw InputError("degenerate affinity: row " + std::to_string(i) + " is all zero after refinement");
      }
    }
  }
  return AffinityMatrix{std::move(a)};
}

SpectralEmbedding eigendecompose(const AffinityMatrix& affinity, int count) {
  const Eigen::Index n = affinity.size();
  if (affinity.values.cols() != n) throw InputError("affinity matrix is not square");
  if (count < 1 || count > n) {
    throw InputError("requested " + std::to_string(count) + " eigenpairs of a " +
                     std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  // LAPACK reads one triangle; hand it the symmetric part so both halves count.
  Eigen::MatrixXd sym = affinity.values;
  {
    const Eigen::MatrixXd transposed = sym.transpose();
    sym = 0.5 * (sym + transposed);
  }
  const double frobenius = sym.norm();

  const auto ln = static_cast<lapack_int>(n);
  lapack_int found = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, sym.data(), ln, 0.0, 0.0,
                     ln - count + 1, ln, 0.0, &found, w.data(), z.data(), ln, support.data());
  if (info != 0 || found != count) {
    std::ostringstream os;
    os << "symmetric eigensolver failed (info=" << info << ", found " << found << " of " << count
       << " eigenpairs) on a " << n << "x" << n << " affinity with Frobenius norm " << frobenius
       << (std::isfinite(frobenius) ? "" : " (non-finite entries)");
    throw std::runtime_error(os.str());
  }

  SpectralEmbedding out;
  out.vectors.resize(n, count);
  out.eigenvalues.resize(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    const int src = count - 1 - c;  // LAPACK returns ascending order
    out.eigenvalues[static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(src)];
    Eigen::VectorXd v = z.col(src);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-10 * scale) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.vectors.col(c) = v;
  }
  return out;
}

SpectralEmbedding spectral_embed(const SpectralEmbedding& spectrum, int k) {
  if (k < 1 || k > spectrum.k()) {
    throw InputError("spectral embedding of dimension " + std::to_string(k) + " requested from " +
                     std::to_string(spectrum.k()) + " eigenpairs");
  }
  SpectralEmbedding out;
  out.vectors = spectrum.vectors.leftCols(k);
  out.eigenvalues.assign(spectrum.eigenvalues.begin(), spectrum.eigenvalues.begin() + k);
  return out;
}

SpectralEmbedding spectral_embed(const AffinityMatrix& affinity, int k) {
  return eigendecompose(affinity, k);
}

int estimate_k(const std::vector<double>& eigenvalues, int k_max) {
  if (eigenvalues.size() < 2) throw InputError("eigen-gap needs at least two eigenvalues");
  if (k_max < 1 || static_cast<std::size_t>(k_max) >= eigenvalues.size()) {
    throw InputError("k_max must be in [1, " + std::to_string(eigenvalues.size() - 1) + "]");
  }
  // Gaps within rounding of each other count as ties, e.g. 1.0 - 0.8 vs 0.8 - 0.6.
  const double eps = 1e-12 * std::max(1.0, std::abs(eigenvalues[0]));
  int best = 1;
  double best_gap = eigenvalues[0] - eigenvalues[1];
  for (int j = 2; j <= k_max; ++j) {
    const double gap = eigenvalues[static_cast<std::size_t>(j - 1)] - eigenvalues[static_cast<std::size_t>(j)];
    if (gap > best_gap + eps) {
      best_gap = gap;
      best = j;
    }
  }
  return best;
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd out = points;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace scriptdiar
