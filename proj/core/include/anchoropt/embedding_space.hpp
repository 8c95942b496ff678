#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "anchoropt/error.hpp"

namespace anchoropt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Rescales every row to unit Euclidean norm. Throws ZeroNormRow if a row
// norm falls below 1e-12 (the normalization Jacobian is singular there).
Matrix normalize_rows(const Matrix& matrix);

// A labeled matrix of unit-norm embedding rows. Rows are normalized once at
// construction; all downstream operations assume unit rows.
class EmbeddingSpace {
 public:
  EmbeddingSpace(std::vector<std::string> keys, Matrix vectors);

  const std::vector<std::string>& keys() const { return keys_; }
  const Matrix& vectors() const { return vectors_; }
  Index size() const { return vectors_.rows(); }
  Index dim() const { return vectors_.cols(); }

  bool contains(const std::string& key) const {
    return lookup_.count(key) > 0;
  }
  // Throws MissingKey if the key is absent.
  Index index_of(const std::string& key) const;

  // Gathers the given rows into a new matrix, preserving order.
  Matrix rows(const std::vector<Index>& indices) const;

 private:
  std::vector<std::string> keys_;
  Matrix vectors_;
  std::unordered_map<std::string, Index> lookup_;
};

// Ordered row indices into an owning space. Order is significant: it fixes
// the column order of relative representations.
struct AnchorSet {
  std::string space_ref;
  std::vector<Index> indices;

  Index size() const { return static_cast<Index>(indices.size()); }
};

// Throws if any index falls outside the owning space.
void validate_anchor_set(const AnchorSet& anchors, const EmbeddingSpace& space);

// A pair of equal-length anchor sets in registered correspondence: entry i
// of x matches entry i of y.
struct ParallelSeed {
  AnchorSet x;
  AnchorSet y;

  Index size() const { return x.size(); }
};

void validate_parallel_seed(const ParallelSeed& seed, const EmbeddingSpace& space_x,
                            const EmbeddingSpace& space_y);

// N x M matrix of cosine similarities between samples and anchors.
struct RelativeRepresentation {
  Matrix values;
  Index anchor_count = 0;
};

// values[i][j] = dot(sample_i, anchor_j); equals cosine similarity when both
// inputs are row-normalized. Throws DimMismatch on inner-dimension mismatch.
RelativeRepresentation relative_projection(const Matrix& samples, const Matrix& anchors);

struct ScoredIndex {
  Index index;
  double similarity;
};

// Cosine similarity with two conventions that keep the retrieval metrics
// well defined: elementwise-equal vectors score exactly 1.0, and the result
// is clamped to [-1, 1].
double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

// Exact top-k by cosine similarity against corpus rows, descending, ties
// broken by ascending index. Throws KTooLarge when k exceeds the corpus and
// DimMismatch when the query dimension differs.
std::vector<ScoredIndex> cosine_topk(const Eigen::Ref<const Vector>& query, const Matrix& corpus,
                                     Index k);

namespace detail {

// Selects the top-k entries of a dense score row (descending score, then
// ascending index). Shared by cosine_topk, retrieval and discretization.
void topk_desc(const Eigen::Ref<const Vector>& scores, Index k, std::vector<Index>* out);

}  // namespace detail

}  // namespace anchoropt
