#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anchoropt/embedding_space.hpp"
#include "anchoropt/retrieval.hpp"

namespace anchoropt {

struct LabeledRelDataset {
  Matrix rel;               // N x M relative representations
  std::vector<int> labels;  // class per row, in [0, n_classes)
  int n_classes = 0;
};

// Single linear softmax layer; the smallest head that isolates the quality
// of the relative space.
struct LinearClassifier {
  Matrix weights;  // C x M
  Vector bias;     // C
  std::string trained_on;
};

// Full-batch softmax cross-entropy minimized with Adam. Deterministic given
// rng_seed (which only drives the weight initialization). Throws
// MissingClass when a class has no example and NonFiniteLoss on divergence.
LinearClassifier train_classifier(const LabeledRelDataset& data, int epochs, double lr,
                                  std::uint64_t rng_seed);

// Argmax of the logits per row; ties resolve to the lowest class index.
std::vector<int> stitch_predict(const LinearClassifier& classifier, const Matrix& rel);

// Per-class F1 combined with support weights.
double weighted_fscore(const std::vector<int>& preds, const std::vector<int>& labels);

double mean_absolute_error(const std::vector<int>& preds, const std::vector<int>& labels);

struct StitchScores {
  double fscore = 0.0;
  double mae = 0.0;
};

struct StitchReport {
  std::string decoder;  // domain the classifier was trained on
  std::string encoder;  // domain it is evaluated on
  std::string method;
  MetricSummary fscore;
  MetricSummary mae;
};

StitchReport aggregate_stitch(const std::vector<StitchScores>& runs, const std::string& decoder,
                              const std::string& encoder, const std::string& method);

void write_stitch_csv(const std::filesystem::path& path, const std::vector<StitchReport>& reports);

}  // namespace anchoropt
