#include "anchoropt/synthetic.hpp"

#include <cstdio>

namespace anchoropt {

namespace {

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = normal(rng);
    }
  }
  return out;
}

std::vector<std::string> numbered_keys(Index n) {
  std::vector<std::string> keys;
  keys.reserve(static_cast<std::size_t>(n));
  char buffer[24];
  for (Index i = 0; i < n; ++i) {
    std::snprintf(buffer, sizeof(buffer), "w%06lld", static_cast<long long>(i));
    keys.emplace_back(buffer);
  }
  return keys;
}

}  // namespace

Matrix random_orthogonal(Index dim, std::mt19937_64& rng) {
  if (dim < 1) {
    raise(errc::invalid_argument, "dimension must be >= 1");
  }
  const Matrix gaussian = standard_normal(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

Matrix random_orthogonal(Index dim, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return random_orthogonal(dim, rng);
}

EmbeddingSpace make_gaussian_space(const SynthSpec& spec) {
  if (spec.n_samples < 2 || spec.dim_x < 2) {
    raise(errc::invalid_argument, "need n_samples >= 2 and dim >= 2");
  }
  std::mt19937_64 rng(spec.rng_seed);
  Matrix vectors;
  if (spec.effective_rank > 0 && spec.effective_rank < spec.dim_x) {
    const Matrix basis = random_orthogonal(spec.dim_x, rng).topRows(spec.effective_rank);
    vectors.noalias() = standard_normal(spec.n_samples, spec.effective_rank, rng) * basis;
    vectors += spec.residual_scale * standard_normal(spec.n_samples, spec.dim_x, rng);
  } else {
    vectors = standard_normal(spec.n_samples, spec.dim_x, rng);
  }
  return EmbeddingSpace(numbered_keys(spec.n_samples), std::move(vectors));
}

EmbeddingSpace make_parallel_space(const EmbeddingSpace& space_x, const Matrix& q,
                                   double noise_sigma, std::uint64_t rng_seed) {
  if (q.rows() != space_x.dim()) {
    raise(errc::dim_mismatch, "map expects dim " + std::to_string(q.rows()) + ", space has " +
                                  std::to_string(space_x.dim()));
  }
  if (noise_sigma < 0.0) {
    raise(errc::invalid_argument, "noise_sigma must be >= 0");
  }
  Matrix vectors = space_x.vectors() * q;
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(rng_seed);
    vectors += noise_sigma * standard_normal(vectors.rows(), vectors.cols(), rng);
  }
  return EmbeddingSpace(space_x.keys(), std::move(vectors));
}

LabeledSpace make_class_clusters(const SynthSpec& spec) {
  if (spec.n_classes < 2) {
    raise(errc::invalid_argument, "class fixtures need n_classes >= 2");
  }
  if (spec.n_samples < spec.n_classes) {
    raise(errc::invalid_argument, "need at least one sample per class");
  }
  std::mt19937_64 rng(spec.rng_seed);
  const bool structured = spec.effective_rank > 0 && spec.effective_rank < spec.dim_x;
  Matrix centroids;
  Matrix jitter;
  if (structured) {
    // Centroids and within-cluster variation share one subspace, so the
    // clusters form a single connected anisotropic manifold.
    const Matrix basis = random_orthogonal(spec.dim_x, rng).topRows(spec.effective_rank);
    centroids =
        normalize_rows(standard_normal(spec.n_classes, spec.effective_rank, rng) * basis);
    jitter.noalias() = standard_normal(spec.n_samples, spec.effective_rank, rng) * basis;
    jitter += spec.residual_scale * standard_normal(spec.n_samples, spec.dim_x, rng);
  } else {
    centroids = normalize_rows(standard_normal(spec.n_classes, spec.dim_x, rng));
    jitter = standard_normal(spec.n_samples, spec.dim_x, rng);
  }
  Matrix vectors(spec.n_samples, spec.dim_x);
  std::vector<int> labels(static_cast<std::size_t>(spec.n_samples));
  for (Index i = 0; i < spec.n_samples; ++i) {
    const int label = static_cast<int>(i % spec.n_classes);
    labels[static_cast<std::size_t>(i)] = label;
    vectors.row(i) = centroids.row(label) + spec.cluster_spread * jitter.row(i);
  }
  return {EmbeddingSpace(numbered_keys(spec.n_samples), std::move(vectors)), std::move(labels)};
}

}  // namespace anchoropt
