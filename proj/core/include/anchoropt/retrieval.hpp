#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anchoropt/embedding_space.hpp"

namespace anchoropt {

// Per-run retrieval means over the evaluated words.
struct RetrievalScores {
  double jaccard = 0.0;
  double mrr = 0.0;
  double cosine = 0.0;
  Index n_words = 0;
  Index k = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across runs
};

struct RetrievalReport {
  std::string direction_src;
  std::string direction_tgt;
  std::string method;
  MetricSummary jaccard;
  MetricSummary mrr;
  MetricSummary cosine;
  Index k = 0;
  Index n_words = 0;
};

// |a intersect b| / |a union b|. Throws EmptySets when both sets are empty.
double jaccard_at_k(const std::vector<Index>& neighbors_a, const std::vector<Index>& neighbors_b);

// 1/rank when true_index appears at 1-based rank <= K in ranked, else 0.
double reciprocal_rank_at_k(Index true_index, const std::vector<Index>& ranked);

// The retrieval protocol over a shared vocabulary: for every word, Jaccard
// between its K-nearest relative neighbors in source and target (query
// excluded from its own neighbor list in both spaces), reciprocal rank of
// its target encoding among the top-K relative neighbors of the source
// query, and the cosine between the two relative vectors.
RetrievalScores retrieval_eval(const EmbeddingSpace& space_src, const EmbeddingSpace& space_tgt,
                               const AnchorSet& anchors_src, const AnchorSet& anchors_tgt,
                               const std::vector<std::string>& parallel_keys, Index k = 10);

MetricSummary summarize(const std::vector<double>& values);

RetrievalReport aggregate_retrieval(const std::vector<RetrievalScores>& runs,
                                    const std::string& direction_src,
                                    const std::string& direction_tgt, const std::string& method);

// CSV with the fixed column order: direction_src, direction_tgt, method,
// jaccard_mean, jaccard_std, mrr_mean, mrr_std, cosine_mean, cosine_std.
void write_retrieval_csv(const std::filesystem::path& path,
                         const std::vector<RetrievalReport>& reports);
std::vector<RetrievalReport> read_retrieval_csv(const std::filesystem::path& path);

// Mean-centered projection onto the top principal directions, with a
// deterministic sign convention (largest-magnitude loading positive).
// Throws DegenerateData when the data has rank 0.
Matrix pca_project(const Matrix& points, Index out_dim = 2);

}  // namespace anchoropt
