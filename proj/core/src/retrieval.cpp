#include "anchoropt/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace anchoropt {

namespace {

// Row-normalize a relative-representation matrix for cosine ranking;
// zero rows are left untouched rather than rejected.
Matrix safe_normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 1e-300) {
      out.row(i) /= norm;
    }
  }
  return out;
}

constexpr Index kEvalBlock = 256;

}  // namespace

double jaccard_at_k(const std::vector<Index>& neighbors_a, const std::vector<Index>& neighbors_b) {
  if (neighbors_a.empty() && neighbors_b.empty()) {
    raise(errc::empty_sets, "jaccard of two empty neighbor sets");
  }
  std::unordered_set<Index> set_a(neighbors_a.begin(), neighbors_a.end());
  std::unordered_set<Index> all(set_a.begin(), set_a.end());
  std::size_t inter = 0;
  for (Index idx : neighbors_b) {
    if (set_a.count(idx)) {
      ++inter;
    }
    all.insert(idx);
  }
  return static_cast<double>(inter) / static_cast<double>(all.size());
}

double reciprocal_rank_at_k(Index true_index, const std::vector<Index>& ranked) {
  for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
    if (ranked[pos] == true_index) {
      return 1.0 / static_cast<double>(pos + 1);
    }
  }
  return 0.0;
}

RetrievalScores retrieval_eval(const EmbeddingSpace& space_src, const EmbeddingSpace& space_tgt,
                               const AnchorSet& anchors_src, const AnchorSet& anchors_tgt,
                               const std::vector<std::string>& parallel_keys, Index k) {
  if (anchors_src.size() != anchors_tgt.size()) {
    raise(errc::anchor_count_mismatch, "anchor sets have sizes " +
                                           std::to_string(anchors_src.size()) + " and " +
                                           std::to_string(anchors_tgt.size()));
  }
  validate_anchor_set(anchors_src, space_src);
  validate_anchor_set(anchors_tgt, space_tgt);
  const Index n = static_cast<Index>(parallel_keys.size());
  if (n < 1) {
    raise(errc::invalid_argument, "no words to evaluate");
  }
  if (k < 1 || k + 1 > n) {
    raise(errc::k_too_large, "k=" + std::to_string(k) + " with " + std::to_string(n) + " words");
  }

  std::vector<Index> src_rows(static_cast<std::size_t>(n));
  std::vector<Index> tgt_rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    src_rows[static_cast<std::size_t>(i)] = space_src.index_of(parallel_keys[i]);
    tgt_rows[static_cast<std::size_t>(i)] = space_tgt.index_of(parallel_keys[i]);
  }

  const Matrix rel_src =
      space_src.rows(src_rows) * space_src.rows(anchors_src.indices).transpose();
  const Matrix rel_tgt =
      space_tgt.rows(tgt_rows) * space_tgt.rows(anchors_tgt.indices).transpose();
  const Matrix unit_src = safe_normalize_rows(rel_src);
  const Matrix unit_tgt = safe_normalize_rows(rel_tgt);

  // Neighbor sets per word in each relative space (query excluded), and the
  // rank of the true counterpart in the cross-space ranking. All three scans
  // are blocked gemms followed by per-row selection.
  std::vector<std::vector<Index>> neigh_src(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> neigh_tgt(static_cast<std::size_t>(n));
  double mrr_sum = 0.0;

  const auto self_excluded_topk = [&](const Matrix& unit, std::vector<std::vector<Index>>* out) {
    for (Index start = 0; start < n; start += kEvalBlock) {
      const Index rows = std::min(kEvalBlock, n - start);
      Matrix sims;
      sims.noalias() = unit.middleRows(start, rows) * unit.transpose();
      std::vector<Index> order;
      for (Index i = 0; i < rows; ++i) {
        detail::topk_desc(sims.row(i).transpose(), k + 1, &order);
        auto& dest = (*out)[static_cast<std::size_t>(start + i)];
        dest.clear();
        for (Index idx : order) {
          if (idx == start + i) continue;
          dest.push_back(idx);
          if (static_cast<Index>(dest.size()) == k) break;
        }
      }
    }
  };
  self_excluded_topk(unit_src, &neigh_src);
  self_excluded_topk(unit_tgt, &neigh_tgt);

  for (Index start = 0; start < n; start += kEvalBlock) {
    const Index rows = std::min(kEvalBlock, n - start);
    Matrix sims;
    sims.noalias() = unit_src.middleRows(start, rows) * unit_tgt.transpose();
    std::vector<Index> order;
    for (Index i = 0; i < rows; ++i) {
      detail::topk_desc(sims.row(i).transpose(), k, &order);
      mrr_sum += reciprocal_rank_at_k(start + i, order);
    }
  }

  double jac_sum = 0.0;
  double cos_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    jac_sum += jaccard_at_k(neigh_src[static_cast<std::size_t>(i)],
                            neigh_tgt[static_cast<std::size_t>(i)]);
    cos_sum += cosine_similarity(rel_src.row(i).transpose(), rel_tgt.row(i).transpose());
  }

  RetrievalScores scores;
  scores.jaccard = jac_sum / static_cast<double>(n);
  scores.mrr = mrr_sum / static_cast<double>(n);
  scores.cosine = cos_sum / static_cast<double>(n);
  scores.n_words = n;
  scores.k = k;
  return scores;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary out;
  if (values.empty()) {
    return out;
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(sq / n);
  return out;
}

RetrievalReport aggregate_retrieval(const std::vector<RetrievalScores>& runs,
                                    const std::string& direction_src,
                                    const std::string& direction_tgt, const std::string& method) {
  if (runs.empty()) {
    raise(errc::invalid_argument, "no runs to aggregate");
  }
  std::vector<double> jac, mrr, cos;
  for (const auto& r : runs) {
    jac.push_back(r.jaccard);
    mrr.push_back(r.mrr);
    cos.push_back(r.cosine);
  }
  RetrievalReport report;
  report.direction_src = direction_src;
  report.direction_tgt = direction_tgt;
  report.method = method;
  report.jaccard = summarize(jac);
  report.mrr = summarize(mrr);
  report.cosine = summarize(cos);
  report.k = runs.front().k;
  report.n_words = runs.front().n_words;
  return report;
}

void write_retrieval_csv(const std::filesystem::path& path,
                         const std::vector<RetrievalReport>& reports) {
  std::ofstream out(path);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out << "direction_src,direction_tgt,method,jaccard_mean,jaccard_std,mrr_mean,mrr_std,"
         "cosine_mean,cosine_std\n";
  out.precision(17);
  for (const auto& r : reports) {
    out << r.direction_src << ',' << r.direction_tgt << ',' << r.method << ',' << r.jaccard.mean
        << ',' << r.jaccard.stddev << ',' << r.mrr.mean << ',' << r.mrr.stddev << ','
        << r.cosine.mean << ',' << r.cosine.stddev << '\n';
  }
}

std::vector<RetrievalReport> read_retrieval_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(errc::invalid_argument, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    raise(errc::parse_error, path.string() + ": empty file");
  }
  std::vector<RetrievalReport> reports;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 9) {
      raise(errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": expected 9 "
                                   "fields, got " + std::to_string(fields.size()));
    }
    RetrievalReport r;
    r.direction_src = fields[0];
    r.direction_tgt = fields[1];
    r.method = fields[2];
    try {
      r.jaccard = {std::stod(fields[3]), std::stod(fields[4])};
      r.mrr = {std::stod(fields[5]), std::stod(fields[6])};
      r.cosine = {std::stod(fields[7]), std::stod(fields[8])};
    } catch (const std::exception&) {
      raise(errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

Matrix pca_project(const Matrix& points, Index out_dim) {
  if (points.rows() < 2) {
    raise(errc::invalid_argument, "pca needs at least two points");
  }
  if (out_dim < 1 || out_dim > points.cols()) {
    raise(errc::invalid_argument, "invalid output dimension");
  }
  Matrix centered = points.rowwise() - points.colwise().mean();
  Matrix covariance =
      (centered.transpose() * centered) / static_cast<double>(points.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  if (solver.info() != Eigen::Success) {
    raise(errc::degenerate_data, "eigendecomposition failed");
  }
  // Eigenvalues come back ascending; take the trailing out_dim columns.
  const Vector evals = solver.eigenvalues();
  if (evals[evals.size() - 1] <= 1e-12) {
    raise(errc::degenerate_data, "data has rank 0");
  }
  Matrix directions(points.cols(), out_dim);
  for (Index c = 0; c < out_dim; ++c) {
    Vector v = solver.eigenvectors().col(evals.size() - 1 - c);
    Index piv = 0;
    for (Index i = 1; i < v.size(); ++i) {
      if (std::abs(v[i]) > std::abs(v[piv])) piv = i;
    }
    if (v[piv] < 0.0) v = -v;
    directions.col(c) = v;
  }
  return centered * directions;
}

}  // namespace anchoropt
