#include "anchoropt/stitch.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace anchoropt {

LinearClassifier train_classifier(const LabeledRelDataset& data, int epochs, double lr,
                                  std::uint64_t rng_seed) {
  const Index n = data.rel.rows();
  const Index m = data.rel.cols();
  if (static_cast<Index>(data.labels.size()) != n) {
    raise(errc::length_mismatch, "labels/rows: " + std::to_string(data.labels.size()) + "/" +
                                     std::to_string(n));
  }
  const int classes = data.n_classes;
  if (classes < 2) {
    raise(errc::missing_class, "need at least two classes, got " + std::to_string(classes));
  }
  std::vector<Index> support(static_cast<std::size_t>(classes), 0);
  for (int label : data.labels) {
    if (label < 0 || label >= classes) {
      raise(errc::invalid_argument, "label " + std::to_string(label) + " outside [0, " +
                                        std::to_string(classes) + ")");
    }
    ++support[static_cast<std::size_t>(label)];
  }
  for (int c = 0; c < classes; ++c) {
    if (support[static_cast<std::size_t>(c)] == 0) {
      raise(errc::missing_class, "class " + std::to_string(c) + " has no examples");
    }
  }
  if (epochs < 1 || lr <= 0.0) {
    raise(errc::invalid_argument, "epochs must be >= 1 and lr positive");
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 0.01);
  Matrix weights(classes, m);
  for (Index i = 0; i < weights.rows(); ++i) {
    for (Index j = 0; j < weights.cols(); ++j) {
      weights(i, j) = normal(rng);
    }
  }
  Vector bias = Vector::Zero(classes);

  Matrix m1_w = Matrix::Zero(classes, m), m2_w = Matrix::Zero(classes, m);
  Vector m1_b = Vector::Zero(classes), m2_b = Vector::Zero(classes);
  constexpr double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;

  Matrix onehot = Matrix::Zero(n, classes);
  for (Index i = 0; i < n; ++i) {
    onehot(i, data.labels[static_cast<std::size_t>(i)]) = 1.0;
  }

  Matrix logits(n, classes), probs(n, classes);
  for (int t = 1; t <= epochs; ++t) {
    logits.noalias() = data.rel * weights.transpose();
    logits.rowwise() += bias.transpose();
    Vector row_max = logits.rowwise().maxCoeff();
    probs = (logits.colwise() - row_max).array().exp().matrix();
    Vector row_sum = probs.rowwise().sum();
    for (Index i = 0; i < n; ++i) {
      probs.row(i) /= row_sum[i];
    }
    const double loss =
        -((probs.array().max(1e-300).log() * onehot.array()).sum()) / static_cast<double>(n);
    if (!std::isfinite(loss)) {
      raise(errc::non_finite_loss, "cross-entropy diverged at epoch " + std::to_string(t));
    }

    Matrix grad_logits = (probs - onehot) / static_cast<double>(n);
    Matrix grad_w = grad_logits.transpose() * data.rel;
    Vector grad_b = grad_logits.colwise().sum();

    const double bias1 = 1.0 - std::pow(b1, t);
    const double bias2 = 1.0 - std::pow(b2, t);
    m1_w = b1 * m1_w + (1.0 - b1) * grad_w;
    m2_w = (b2 * m2_w.array() + (1.0 - b2) * grad_w.array().square()).matrix();
    weights.array() -=
        lr * (m1_w.array() / bias1) / ((m2_w.array() / bias2).sqrt() + adam_eps);
    m1_b = b1 * m1_b + (1.0 - b1) * grad_b;
    m2_b = (b2 * m2_b.array() + (1.0 - b2) * grad_b.array().square()).matrix();
    bias.array() -= lr * (m1_b.array() / bias1) / ((m2_b.array() / bias2).sqrt() + adam_eps);
  }

  LinearClassifier out;
  out.weights = std::move(weights);
  out.bias = std::move(bias);
  return out;
}

std::vector<int> stitch_predict(const LinearClassifier& classifier, const Matrix& rel) {
  if (rel.cols() != classifier.weights.cols()) {
    raise(errc::dim_mismatch, "rel dim " + std::to_string(rel.cols()) + " != classifier dim " +
                                  std::to_string(classifier.weights.cols()));
  }
  Matrix logits = rel * classifier.weights.transpose();
  logits.rowwise() += classifier.bias.transpose();
  std::vector<int> preds(static_cast<std::size_t>(rel.rows()));
  for (Index i = 0; i < logits.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    preds[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return preds;
}

double weighted_fscore(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) {
    raise(errc::length_mismatch, std::to_string(preds.size()) + " predictions vs " +
                                     std::to_string(labels.size()) + " labels");
  }
  if (preds.empty()) {
    raise(errc::invalid_argument, "empty prediction list");
  }
  int max_class = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    max_class = std::max({max_class, preds[i], labels[i]});
  }
  double total = 0.0;
  for (int c = 0; c <= max_class; ++c) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool pred_c = preds[i] == c;
      const bool label_c = labels[i] == c;
      if (pred_c && label_c) ++tp;
      if (pred_c && !label_c) ++fp;
      if (!pred_c && label_c) ++fn;
      if (label_c) ++support;
    }
    if (support == 0) continue;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 =
        precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += f1 * support / static_cast<double>(labels.size());
  }
  return total;
}

double mean_absolute_error(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) {
    raise(errc::length_mismatch, std::to_string(preds.size()) + " predictions vs " +
                                     std::to_string(labels.size()) + " labels");
  }
  if (preds.empty()) {
    raise(errc::invalid_argument, "empty prediction list");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += std::abs(preds[i] - labels[i]);
  }
  return sum / static_cast<double>(preds.size());
}

StitchReport aggregate_stitch(const std::vector<StitchScores>& runs, const std::string& decoder,
                              const std::string& encoder, const std::string& method) {
  if (runs.empty()) {
    raise(errc::invalid_argument, "no runs to aggregate");
  }
  std::vector<double> fs, mae;
  for (const auto& r : runs) {
    fs.push_back(r.fscore);
    mae.push_back(r.mae);
  }
  StitchReport report;
  report.decoder = decoder;
  report.encoder = encoder;
  report.method = method;
  report.fscore = summarize(fs);
  report.mae = summarize(mae);
  return report;
}

void write_stitch_csv(const std::filesystem::path& path,
                      const std::vector<StitchReport>& reports) {
  std::ofstream out(path);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out << "decoder,encoder,method,fscore_mean,fscore_std,mae_mean,mae_std\n";
  out.precision(17);
  for (const auto& r : reports) {
    out << r.decoder << ',' << r.encoder << ',' << r.method << ',' << r.fscore.mean << ','
        << r.fscore.stddev << ',' << r.mae.mean << ',' << r.mae.stddev << '\n';
  }
}

}  // namespace anchoropt
