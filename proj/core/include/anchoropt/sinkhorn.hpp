#pragma once

#include <vector>

#include "anchoropt/embedding_space.hpp"

namespace anchoropt {

struct SinkhornConfig {
  double eps = 1e-4;
  int max_steps = 1;
  double stop_error = 1e-5;
};

// Entropic transport plan between uniform marginals. Rows index target
// samples (y), columns index source samples (x). Total mass is 1; after the
// terminal row-scaling step every row sums to exactly 1/P.
struct TransportPlan {
  Matrix plan;
  double eps = 0.0;
  int iterations_run = 0;
  double marginal_error = 0.0;
};

// cost[i][j] = squared Euclidean distance between target relative row i and
// source relative row j. Computed in row blocks so that no intermediate
// exceeds the entry budget.
Matrix cost_matrix(const RelativeRepresentation& rel_src, const RelativeRepresentation& rel_tgt);

// Same cost, factored through the embedding-side product: the relative rows
// of the targets are targets_y * anchors^T with anchors = exposed estimate,
// so the Gram term reduces to rank dim(Y) instead of rank M. Used by the
// optimizer's inner loop; agrees with cost_matrix to rounding.
Matrix low_rank_squared_cost(const Matrix& targets_y, const Matrix& anchors_exposed,
                             const Matrix& rel_src);

// Log-domain Sinkhorn with uniform marginals: alternating column/row
// potential updates via logsumexp, stopping at max_steps or when the
// marginal error drops below stop_error. The returned plan ends with a
// row-normalization so row marginals are exact.
TransportPlan sinkhorn_plan(const Matrix& cost, const SinkhornConfig& config);

// Per-row argmax of the plan, ties broken by ascending column. Total over
// target rows; not necessarily injective.
std::vector<Index> hard_correspondence(const TransportPlan& plan);

}  // namespace anchoropt
