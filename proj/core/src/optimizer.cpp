#include "anchoropt/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace anchoropt {

namespace {

constexpr double kMinRawNorm = 1e-12;

template <typename Block>
void fill_standard_normal(Block block, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < block.rows(); ++i) {
    for (Index j = 0; j < block.cols(); ++j) {
      block(i, j) = normal(rng);
    }
  }
}

// First `count` elements of a Fisher-Yates shuffle of [0, n).
std::vector<Index> sample_without_replacement(Index n, Index count, std::mt19937_64& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

Matrix gather_rows(const Matrix& source, const std::vector<Index>& indices) {
  Matrix out(static_cast<Index>(indices.size()), source.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    out.row(i) = source.row(indices[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

AnchorEstimate::AnchorEstimate(Matrix raw, Index seed_count, bool frozen_seed)
    : raw_(std::move(raw)), seed_count_(seed_count), frozen_seed_(frozen_seed) {}

AnchorEstimate AnchorEstimate::init(const Matrix& seed_embeddings, Index total,
                                    std::mt19937_64& rng, bool frozen_seed) {
  const Index seed_count = seed_embeddings.rows();
  if (seed_count > total) {
    raise(errc::seed_exceeds_total, "seed rows " + std::to_string(seed_count) +
                                        " exceed total anchors " + std::to_string(total));
  }
  if (seed_embeddings.cols() < 1) {
    raise(errc::invalid_argument, "seed embeddings need at least one column");
  }
  Matrix raw(total, seed_embeddings.cols());
  raw.topRows(seed_count) = seed_embeddings;
  if (total > seed_count) {
    fill_standard_normal(raw.bottomRows(total - seed_count), rng);
  }
  return AnchorEstimate(std::move(raw), seed_count, frozen_seed);
}

AnchorEstimate AnchorEstimate::init(const Matrix& seed_embeddings, Index total,
                                    std::uint64_t rng_seed, bool frozen_seed) {
  std::mt19937_64 rng(rng_seed);
  return init(seed_embeddings, total, rng, frozen_seed);
}

const Matrix& AnchorEstimate::exposed() const {
  if (!exposed_valid_) {
    exposed_ = normalize_rows(raw_);
    exposed_valid_ = true;
  }
  return exposed_;
}

int AnchorEstimate::reseed_degenerate_rows(std::mt19937_64& rng) {
  int count = 0;
  for (Index i = 0; i < raw_.rows(); ++i) {
    if (raw_.row(i).norm() < kMinRawNorm) {
      fill_standard_normal(raw_.row(i), rng);
      ++count;
    }
  }
  if (count > 0) {
    exposed_valid_ = false;
  }
  return count;
}

LossGrad loss_and_gradient(const Matrix& rel_x_permuted, const Matrix& targets_y,
                           const AnchorEstimate& estimate) {
  const Matrix& raw = estimate.raw();
  const Matrix& exposed = estimate.exposed();
  if (targets_y.cols() != raw.cols() || rel_x_permuted.rows() != targets_y.rows() ||
      rel_x_permuted.cols() != raw.rows()) {
    raise(errc::dim_mismatch, "loss shapes: rel " + std::to_string(rel_x_permuted.rows()) + "x" +
                                  std::to_string(rel_x_permuted.cols()) + ", targets " +
                                  std::to_string(targets_y.rows()) + "x" +
                                  std::to_string(targets_y.cols()) + ", raw " +
                                  std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  }

  Matrix diff;
  diff.noalias() = targets_y * exposed.transpose();
  diff -= rel_x_permuted;

  const double size = static_cast<double>(diff.rows()) * static_cast<double>(diff.cols());
  LossGrad result;
  result.mse = diff.squaredNorm() / size;
  if (!std::isfinite(result.mse)) {
    raise(errc::non_finite_loss, "mse is not finite");
  }

  // d mse / d a_k = (2/size) * sum_p diff[p,k] * y_p
  Matrix grad_exposed;
  grad_exposed.noalias() = (2.0 / size) * (diff.transpose() * targets_y);

  // Chain through a = v/||v||: grad_v = (g - (g . a) a) / ||v||.
  result.grad_raw.resize(raw.rows(), raw.cols());
  for (Index i = 0; i < raw.rows(); ++i) {
    const double norm = raw.row(i).norm();
    const double along = grad_exposed.row(i).dot(exposed.row(i));
    result.grad_raw.row(i) = (grad_exposed.row(i) - along * exposed.row(i)) / norm;
  }
  if (estimate.frozen_seed() && estimate.seed_count() > 0) {
    result.grad_raw.topRows(estimate.seed_count()).setZero();
  }
  return result;
}

void adam_step(AnchorEstimate& estimate, const Matrix& grad_raw, AdamState& state,
               const OptimizerConfig& config) {
  if (grad_raw.rows() != estimate.rows() || grad_raw.cols() != estimate.dim()) {
    raise(errc::dim_mismatch, "gradient shape does not match estimate");
  }
  if (!grad_raw.allFinite()) {
    raise(errc::non_finite_gradient, "gradient contains NaN or infinity");
  }
  state.step_count += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.first_moment = b1 * state.first_moment + (1.0 - b1) * grad_raw;
  state.second_moment =
      (b2 * state.second_moment.array() + (1.0 - b2) * grad_raw.array().square()).matrix();
  const double bias1 = 1.0 - std::pow(b1, state.step_count);
  const double bias2 = 1.0 - std::pow(b2, state.step_count);
  Matrix& raw = estimate.mutable_raw();
  raw.array() -= config.learning_rate * (state.first_moment.array() / bias1) /
                 ((state.second_moment.array() / bias2).sqrt() + config.adam_eps);
}

std::vector<Index> seed_first_anchor_order(const AnchorSet& anchors_x, const ParallelSeed& seed) {
  std::unordered_set<Index> seed_set(seed.x.indices.begin(), seed.x.indices.end());
  if (seed_set.size() != seed.x.indices.size()) {
    raise(errc::invalid_argument, "seed x indices contain duplicates");
  }
  std::vector<Index> ordered = seed.x.indices;
  ordered.reserve(anchors_x.indices.size());
  for (Index idx : anchors_x.indices) {
    if (!seed_set.count(idx)) {
      ordered.push_back(idx);
    }
  }
  if (ordered.size() != anchors_x.indices.size()) {
    raise(errc::anchor_count_mismatch,
          "anchors_x must contain every seed x index exactly once (got " +
              std::to_string(anchors_x.indices.size()) + " anchors, " +
              std::to_string(ordered.size()) + " after reordering)");
  }
  return ordered;
}

OptimizeResult optimize_anchors(const EmbeddingSpace& space_x, const AnchorSet& anchors_x,
                                const EmbeddingSpace& space_y, const ParallelSeed& seed,
                                const OptimizerConfig& config, const StepObserver& observer) {
  using clock = std::chrono::steady_clock;

  if (seed.size() == 0) {
    raise(errc::empty_seed, "the optimization requires a nonempty parallel seed");
  }
  validate_parallel_seed(seed, space_x, space_y);
  validate_anchor_set(anchors_x, space_x);
  if (anchors_x.size() != config.total_anchors) {
    raise(errc::anchor_count_mismatch, "anchors_x has " + std::to_string(anchors_x.size()) +
                                           " entries, config expects " +
                                           std::to_string(config.total_anchors));
  }
  if (config.steps < 1 || config.learning_rate <= 0.0) {
    raise(errc::invalid_argument, "steps must be >= 1 and learning_rate positive");
  }

  const std::vector<Index> anchor_order = seed_first_anchor_order(anchors_x, seed);
  const Matrix anchor_x_rows = space_x.rows(anchor_order);
  const Matrix seed_y_rows = space_y.rows(seed.y.indices);

  std::mt19937_64 rng(config.rng_seed);
  AnchorEstimate estimate = AnchorEstimate::init(seed_y_rows, config.total_anchors, rng,
                                                 config.freeze_seed);
  AdamState adam = AdamState::zeros(estimate.rows(), estimate.dim());

  const Index n_x = space_x.size();
  const Index n_y = space_y.size();
  const bool use_all_x = config.subsample_per_step <= 0 || config.subsample_per_step >= n_x;
  const bool use_all_y = config.subsample_per_step <= 0 || config.subsample_per_step >= n_y;

  Matrix rel_x_all;
  if (use_all_x) {
    rel_x_all.noalias() = space_x.vectors() * anchor_x_rows.transpose();
  }

  OptimizationTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(config.steps));

  Matrix rel_x;
  Matrix targets_y;
  for (int step = 1; step <= config.steps; ++step) {
    const auto started = clock::now();

    if (!use_all_x) {
      const auto x_idx = sample_without_replacement(n_x, config.subsample_per_step, rng);
      rel_x.noalias() = gather_rows(space_x.vectors(), x_idx) * anchor_x_rows.transpose();
    }
    const Matrix& rel_x_step = use_all_x ? rel_x_all : rel_x;

    if (!use_all_y) {
      const auto y_idx = sample_without_replacement(n_y, config.subsample_per_step, rng);
      targets_y = gather_rows(space_y.vectors(), y_idx);
    }
    const Matrix& targets_step = use_all_y ? space_y.vectors() : targets_y;

    const Matrix cost = low_rank_squared_cost(targets_step, estimate.exposed(), rel_x_step);
    const TransportPlan plan = sinkhorn_plan(cost, config.sinkhorn);
    const std::vector<Index> correspondence = hard_correspondence(plan);
    const Matrix rel_x_permuted = gather_rows(rel_x_step, correspondence);

    LossGrad lg = loss_and_gradient(rel_x_permuted, targets_step, estimate);
    adam_step(estimate, lg.grad_raw, adam, config);
    trace.reseed_events += estimate.reseed_degenerate_rows(rng);

    StepRecord record;
    record.step = step;
    record.mse = lg.mse;
    record.marginal_error = plan.marginal_error;
    record.wall_time = std::chrono::duration<double>(clock::now() - started).count();
    trace.steps.push_back(record);
    if (observer) {
      observer(record, estimate);
    }
  }

  return {std::move(estimate), std::move(trace)};
}

DiscretizeResult discretize_anchors(const AnchorEstimate& estimate,
                                    const EmbeddingSpace& space_y) {
  if (estimate.dim() != space_y.dim()) {
    raise(errc::dim_mismatch, "estimate dim " + std::to_string(estimate.dim()) +
                                  " != space dim " + std::to_string(space_y.dim()));
  }
  const Matrix& exposed = estimate.exposed();
  DiscretizeResult result;
  result.anchors.indices.resize(static_cast<std::size_t>(exposed.rows()));

  // Both sides are unit rows, so the cosine-nearest row maximizes the dot
  // product. Computed in row blocks to bound the similarity buffer.
  const Index block = 512;
  for (Index start = 0; start < exposed.rows(); start += block) {
    const Index rows = std::min(block, exposed.rows() - start);
    Matrix sims;
    sims.noalias() = exposed.middleRows(start, rows) * space_y.vectors().transpose();
    for (Index i = 0; i < rows; ++i) {
      Index best = 0;
      double best_value = sims(i, 0);
      for (Index j = 1; j < sims.cols(); ++j) {
        if (sims(i, j) > best_value) {
          best_value = sims(i, j);
          best = j;
        }
      }
      result.anchors.indices[static_cast<std::size_t>(start + i)] = best;
    }
  }
  std::unordered_set<Index> distinct(result.anchors.indices.begin(),
                                     result.anchors.indices.end());
  result.collisions = static_cast<int>(result.anchors.indices.size() - distinct.size());
  return result;
}

}  // namespace anchoropt
