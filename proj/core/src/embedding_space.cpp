#include "anchoropt/embedding_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace anchoropt {

namespace {
constexpr double kMinRowNorm = 1e-12;
}

Matrix normalize_rows(const Matrix& matrix) {
  Matrix out(matrix.rows(), matrix.cols());
  for (Index i = 0; i < matrix.rows(); ++i) {
    const double norm = matrix.row(i).norm();
    if (norm < kMinRowNorm) {
      raise(errc::zero_norm_row, "row " + std::to_string(i) + " has norm " + std::to_string(norm));
    }
    out.row(i) = matrix.row(i) / norm;
  }
  return out;
}

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> keys, Matrix vectors)
    : keys_(std::move(keys)), vectors_(normalize_rows(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) {
    raise(errc::invalid_argument, "embedding space needs at least one row and one column");
  }
  if (static_cast<Index>(keys_.size()) != vectors_.rows()) {
    raise(errc::length_mismatch, "key count " + std::to_string(keys_.size()) +
                                     " != row count " + std::to_string(vectors_.rows()));
  }
  lookup_.reserve(keys_.size());
  for (Index i = 0; i < static_cast<Index>(keys_.size()); ++i) {
    if (!lookup_.emplace(keys_[i], i).second) {
      raise(errc::duplicate_key, keys_[i]);
    }
  }
}

Index EmbeddingSpace::index_of(const std::string& key) const {
  auto it = lookup_.find(key);
  if (it == lookup_.end()) {
    raise(errc::missing_key, key);
  }
  return it->second;
}

Matrix EmbeddingSpace::rows(const std::vector<Index>& indices) const {
  Matrix out(static_cast<Index>(indices.size()), dim());
  for (Index i = 0; i < out.rows(); ++i) {
    const Index r = indices[static_cast<std::size_t>(i)];
    if (r < 0 || r >= size()) {
      raise(errc::invalid_argument, "row index " + std::to_string(r) + " out of range");
    }
    out.row(i) = vectors_.row(r);
  }
  return out;
}

void validate_anchor_set(const AnchorSet& anchors, const EmbeddingSpace& space) {
  for (Index idx : anchors.indices) {
    if (idx < 0 || idx >= space.size()) {
      raise(errc::invalid_argument,
            "anchor index " + std::to_string(idx) + " outside space of size " +
                std::to_string(space.size()));
    }
  }
}

void validate_parallel_seed(const ParallelSeed& seed, const EmbeddingSpace& space_x,
                            const EmbeddingSpace& space_y) {
  if (seed.x.size() != seed.y.size()) {
    raise(errc::anchor_count_mismatch, "seed sides have sizes " + std::to_string(seed.x.size()) +
                                           " and " + std::to_string(seed.y.size()));
  }
  validate_anchor_set(seed.x, space_x);
  validate_anchor_set(seed.y, space_y);
}

RelativeRepresentation relative_projection(const Matrix& samples, const Matrix& anchors) {
  if (samples.cols() != anchors.cols()) {
    raise(errc::dim_mismatch, "sample dim " + std::to_string(samples.cols()) + " != anchor dim " +
                                  std::to_string(anchors.cols()));
  }
  RelativeRepresentation rel;
  rel.values.noalias() = samples * anchors.transpose();
  rel.anchor_count = anchors.rows();
  return rel;
}

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) {
    raise(errc::dim_mismatch, "vector sizes " + std::to_string(a.size()) + " and " +
                                  std::to_string(b.size()));
  }
  if (a == b) {
    return 1.0;
  }
  const double denom = a.norm() * b.norm();
  if (denom < 1e-300) {
    return 0.0;
  }
  return std::clamp(a.dot(b) / denom, -1.0, 1.0);
}

namespace detail {

void topk_desc(const Eigen::Ref<const Vector>& scores, Index k, std::vector<Index>* out) {
  const Index n = scores.size();
  out->resize(static_cast<std::size_t>(n));
  std::iota(out->begin(), out->end(), Index{0});
  const auto better = [&scores](Index lhs, Index rhs) {
    if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
    return lhs < rhs;
  };
  if (k < n) {
    std::partial_sort(out->begin(), out->begin() + k, out->end(), better);
    out->resize(static_cast<std::size_t>(k));
  } else {
    std::sort(out->begin(), out->end(), better);
  }
}

}  // namespace detail

std::vector<ScoredIndex> cosine_topk(const Eigen::Ref<const Vector>& query, const Matrix& corpus,
                                     Index k) {
  if (query.size() != corpus.cols()) {
    raise(errc::dim_mismatch, "query dim " + std::to_string(query.size()) + " != corpus dim " +
                                  std::to_string(corpus.cols()));
  }
  if (k < 1 || k > corpus.rows()) {
    raise(errc::k_too_large,
          "k=" + std::to_string(k) + " with corpus of " + std::to_string(corpus.rows()) + " rows");
  }
  const double qnorm = std::max(query.norm(), 1e-300);
  Vector scores = corpus * query;
  for (Index i = 0; i < corpus.rows(); ++i) {
    scores[i] /= std::max(corpus.row(i).norm(), 1e-300) * qnorm;
  }
  std::vector<Index> order;
  detail::topk_desc(scores, k, &order);
  std::vector<ScoredIndex> out;
  out.reserve(order.size());
  for (Index idx : order) {
    out.push_back({idx, std::clamp(scores[idx], -1.0, 1.0)});
  }
  return out;
}

}  // namespace anchoropt
