#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "anchoropt/embedding_space.hpp"
#include "anchoropt/sinkhorn.hpp"

namespace anchoropt {

struct OptimizerConfig {
  Index total_anchors = 300;
  Index seed_anchors = 15;
  int steps = 250;              // 125 for the stitching profile
  double learning_rate = 0.02;  // 0.05 for the stitching profile
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t rng_seed = 0;
  SinkhornConfig sinkhorn{};
  Index subsample_per_step = 2000;  // <= 0 means use every sample
  bool freeze_seed = false;
};

// Candidate anchor matrix under the unit-norm constraint. Stores
// unconstrained raw parameters v; the constrained rows a_i = v_i / ||v_i||
// are exposed through exposed(). Raw rows that collapse below 1e-12 are
// re-seeded with fresh noise (the normalization Jacobian is singular at 0).
class AnchorEstimate {
 public:
  // Leading rows copy the seed embeddings, the rest are standard normal
  // draws from the stream. Throws SeedExceedsTotal.
  static AnchorEstimate init(const Matrix& seed_embeddings, Index total, std::mt19937_64& rng,
                             bool frozen_seed = false);
  static AnchorEstimate init(const Matrix& seed_embeddings, Index total, std::uint64_t rng_seed,
                             bool frozen_seed = false);

  const Matrix& raw() const { return raw_; }
  Matrix& mutable_raw() {
    exposed_valid_ = false;
    return raw_;
  }
  const Matrix& exposed() const;

  Index rows() const { return raw_.rows(); }
  Index dim() const { return raw_.cols(); }
  Index seed_count() const { return seed_count_; }
  bool frozen_seed() const { return frozen_seed_; }

  // Re-draws rows whose raw norm fell below 1e-12. Returns how many.
  int reseed_degenerate_rows(std::mt19937_64& rng);

 private:
  AnchorEstimate(Matrix raw, Index seed_count, bool frozen_seed);

  Matrix raw_;
  Index seed_count_ = 0;
  bool frozen_seed_ = false;
  mutable Matrix exposed_;
  mutable bool exposed_valid_ = false;
};

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  int step_count = 0;

  static AdamState zeros(Index rows, Index cols) {
    return {Matrix::Zero(rows, cols), Matrix::Zero(rows, cols), 0};
  }
};

struct StepRecord {
  int step = 0;
  double mse = 0.0;
  double marginal_error = 0.0;
  double wall_time = 0.0;  // seconds spent in this step
};

struct OptimizationTrace {
  std::vector<StepRecord> steps;
  int reseed_events = 0;
};

struct LossGrad {
  double mse = 0.0;
  Matrix grad_raw;
};

// Mean squared error between rel_x_permuted and targets_y * exposed^T,
// with the exact analytic gradient with respect to the raw parameters
// (chained through a = v/||v||, Jacobian (I - a a^T)/||v||). Frozen seed
// rows receive zero gradient.
LossGrad loss_and_gradient(const Matrix& rel_x_permuted, const Matrix& targets_y,
                           const AnchorEstimate& estimate);

// Bias-corrected Adam update on the raw parameters.
void adam_step(AnchorEstimate& estimate, const Matrix& grad_raw, AdamState& state,
               const OptimizerConfig& config);

// Called after each optimization step with the step record and the current
// estimate; used by tests to watch invariants along the trajectory.
using StepObserver = std::function<void(const StepRecord&, const AnchorEstimate&)>;

struct OptimizeResult {
  AnchorEstimate estimate;
  OptimizationTrace trace;
};

// The anchor-discovery loop: initialize the estimate from the seed plus
// noise, then for config.steps iterations re-estimate the correspondence
// with Sinkhorn, permute the source relative rows, and take an Adam step on
// the MSE through the unit-norm reparameterization.
//
// anchors_x must contain the seed's x indices; they are moved to the front
// so relative columns line up with the estimate's seed rows. Sampling,
// initialization and every update draw from a single stream seeded with
// config.rng_seed, so runs are reproducible.
OptimizeResult optimize_anchors(const EmbeddingSpace& space_x, const AnchorSet& anchors_x,
                                const EmbeddingSpace& space_y, const ParallelSeed& seed,
                                const OptimizerConfig& config, const StepObserver& observer = {});

// Reorders anchors_x so its first entries equal the seed's x indices.
// Throws AnchorCountMismatch if a seed index is absent.
std::vector<Index> seed_first_anchor_order(const AnchorSet& anchors_x, const ParallelSeed& seed);

struct DiscretizeResult {
  AnchorSet anchors;
  int collisions = 0;  // rows minus distinct snapped indices
};

// Snaps every exposed row to the cosine-nearest row of space_y (ties to the
// lowest index), preserving row order.
DiscretizeResult discretize_anchors(const AnchorEstimate& estimate, const EmbeddingSpace& space_y);

}  // namespace anchoropt
