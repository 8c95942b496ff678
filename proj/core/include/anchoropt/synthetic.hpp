#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "anchoropt/embedding_space.hpp"

namespace anchoropt {

// Generator settings for synthetic parallel spaces. When effective_rank is
// in (0, dim), samples concentrate in an effective_rank-dimensional
// subspace plus a small isotropic residual; the anisotropy stands in for
// the structure of trained embeddings, which the anchor bootstrap needs.
struct SynthSpec {
  Index n_samples = 2000;
  Index dim_x = 64;
  Index dim_y = 64;  // equal to dim_x in orthogonal mode
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  int n_classes = 0;             // > 0 only for stitching fixtures
  Index effective_rank = 0;      // 0 means isotropic
  double residual_scale = 0.05;  // isotropic component under low-rank structure
  double cluster_spread = 0.35;  // within-cluster spread for class fixtures
};

// Orthonormalization of a Gaussian matrix with a deterministic sign
// convention: Q^T Q = I within 1e-10.
Matrix random_orthogonal(Index dim, std::mt19937_64& rng);
Matrix random_orthogonal(Index dim, std::uint64_t rng_seed);

// Unit-norm Gaussian space with keys w000000, w000001, ...; low-rank
// structure when spec.effective_rank > 0.
EmbeddingSpace make_gaussian_space(const SynthSpec& spec);

// Y rows = normalize(X Q + noise_sigma * gaussian), keys preserved in
// order. Downstream harnesses shuffle the rows to break the positional
// correspondence; keys keep the ground truth recoverable.
EmbeddingSpace make_parallel_space(const EmbeddingSpace& space_x, const Matrix& q,
                                   double noise_sigma, std::uint64_t rng_seed);

struct LabeledSpace {
  EmbeddingSpace space;
  std::vector<int> labels;
};

// Unit-norm Gaussian clusters around n_classes random unit centroids,
// labels assigned round-robin so every class is populated.
LabeledSpace make_class_clusters(const SynthSpec& spec);

}  // namespace anchoropt
