#include "anchoropt/sinkhorn.hpp"

#include <cmath>

namespace anchoropt {

namespace {

// Entry budget for a single dense block of the cost matrix (~128 MB of
// doubles). Larger problems are processed in row blocks.
constexpr Index kCostEntryBudget = Index{16} * 1024 * 1024;

Matrix squared_distances(const Matrix& tgt, const Matrix& src) {
  const Index p = tgt.rows();
  const Index nx = src.rows();
  const Vector tgt_sq = tgt.rowwise().squaredNorm();
  const Vector src_sq = src.rowwise().squaredNorm();
  Matrix cost(p, nx);
  const Index block = std::max<Index>(1, kCostEntryBudget / std::max<Index>(1, nx));
  for (Index start = 0; start < p; start += block) {
    const Index rows = std::min(block, p - start);
    cost.middleRows(start, rows).noalias() = -2.0 * tgt.middleRows(start, rows) * src.transpose();
    cost.middleRows(start, rows).colwise() += tgt_sq.segment(start, rows);
    cost.middleRows(start, rows).rowwise() += src_sq.transpose();
  }
  return cost.cwiseMax(0.0);
}

}  // namespace

Matrix cost_matrix(const RelativeRepresentation& rel_src, const RelativeRepresentation& rel_tgt) {
  if (rel_src.values.cols() != rel_tgt.values.cols()) {
    raise(errc::dim_mismatch, "relative representations have " +
                                  std::to_string(rel_src.values.cols()) + " and " +
                                  std::to_string(rel_tgt.values.cols()) + " anchors");
  }
  return squared_distances(rel_tgt.values, rel_src.values);
}

Matrix low_rank_squared_cost(const Matrix& targets_y, const Matrix& anchors_exposed,
                             const Matrix& rel_src) {
  if (targets_y.cols() != anchors_exposed.cols() || rel_src.cols() != anchors_exposed.rows()) {
    raise(errc::dim_mismatch, "inconsistent shapes in low-rank cost");
  }
  const Vector src_sq = rel_src.rowwise().squaredNorm();
  Matrix rel_tgt;
  rel_tgt.noalias() = targets_y * anchors_exposed.transpose();
  const Vector tgt_sq = rel_tgt.rowwise().squaredNorm();
  // Gram term through the d-dimensional factor: R_Y R_X^T = Y (R_X A)^T.
  Matrix cost;
  cost.noalias() = targets_y * (rel_src * anchors_exposed).transpose();
  cost *= -2.0;
  cost.colwise() += tgt_sq;
  cost.rowwise() += src_sq.transpose();
  return cost.cwiseMax(0.0);
}

TransportPlan sinkhorn_plan(const Matrix& cost, const SinkhornConfig& config) {
  if (cost.rows() < 1 || cost.cols() < 1) {
    raise(errc::invalid_argument, "empty cost matrix");
  }
  if (config.eps <= 0.0 || config.max_steps < 1 || config.stop_error <= 0.0) {
    raise(errc::invalid_argument, "sinkhorn config fields must be positive");
  }
  if (!cost.allFinite()) {
    raise(errc::non_finite_cost, "cost matrix contains NaN or infinity");
  }

  const Index p = cost.rows();
  const Index nx = cost.cols();
  const double eps = config.eps;
  const double row_mass = 1.0 / static_cast<double>(p);
  const double col_mass = 1.0 / static_cast<double>(nx);
  const double log_row_mass = std::log(row_mass);
  const double log_col_mass = std::log(col_mass);

  Vector f = Vector::Zero(p);
  Vector g = Vector::Zero(nx);
  Matrix scaled(p, nx);

  // lse over rows of `scaled` (result has one entry per column).
  const auto logsumexp_cols = [&](Vector* out) {
    Eigen::RowVectorXd maxes = scaled.colwise().maxCoeff();
    Eigen::RowVectorXd sums = (scaled.rowwise() - maxes).array().exp().colwise().sum();
    *out = (sums.array().log().matrix() + maxes).transpose();
  };
  // lse over columns of `scaled` (result has one entry per row).
  const auto logsumexp_rows = [&](Vector* out) {
    Vector maxes = scaled.rowwise().maxCoeff();
    Vector sums = (scaled.colwise() - maxes).array().exp().rowwise().sum();
    *out = sums.array().log().matrix() + maxes;
  };

  TransportPlan result;
  result.eps = eps;

  Vector lse;
  int iterations = 0;
  for (int step = 1; step <= config.max_steps; ++step) {
    iterations = step;
    // Column potentials, then row potentials last so rows finish exact.
    scaled = -cost;
    scaled.colwise() += f;
    scaled /= eps;
    logsumexp_cols(&lse);
    g = eps * (Vector::Constant(nx, log_col_mass) - lse);

    scaled = -cost;
    scaled.rowwise() += g.transpose();
    scaled /= eps;
    logsumexp_rows(&lse);
    f = eps * (Vector::Constant(p, log_row_mass) - lse);

    scaled = -cost;
    scaled.colwise() += f;
    scaled.rowwise() += g.transpose();
    scaled /= eps;
    result.plan = scaled.array().exp().matrix();
    const Vector row_sums = result.plan.rowwise().sum();
    const Eigen::RowVectorXd col_sums = result.plan.colwise().sum();
    const double error = std::max((row_sums.array() - row_mass).abs().maxCoeff(),
                                  (col_sums.array() - col_mass).abs().maxCoeff());
    if (error < config.stop_error) {
      break;
    }
  }

  if (!result.plan.allFinite()) {
    raise(errc::numerical_overflow, "plan contains non-finite entries");
  }

  // Terminal row scaling: row marginals become exact, columns keep whatever
  // residual the potentials left.
  const Vector row_sums = result.plan.rowwise().sum();
  for (Index i = 0; i < p; ++i) {
    result.plan.row(i) *= row_mass / row_sums[i];
  }
  const Eigen::RowVectorXd col_sums = result.plan.colwise().sum();
  result.marginal_error = (col_sums.array() - col_mass).abs().maxCoeff();
  result.iterations_run = iterations;
  return result;
}

std::vector<Index> hard_correspondence(const TransportPlan& plan) {
  const Matrix& m = plan.plan;
  if (m.rows() < 1 || m.cols() < 1) {
    raise(errc::invalid_argument, "empty transport plan");
  }
  std::vector<Index> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    Index best = 0;
    double best_value = m(i, 0);
    for (Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > best_value) {
        best_value = m(i, j);
        best = j;
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace anchoropt
