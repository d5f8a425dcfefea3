#pragma once

// Directed and time-varying topologies: structural equation models with
// exogenous inputs, lagged vector autoregressions and exponentially weighted
// tracking of a switching SEM.

#include <vector>

#include "glk/graph.hpp"
#include "glk/solvers.hpp"
#include "glk/statnet.hpp"

namespace glk {

/// One N x T block per cascade; U[c] is aligned column for column with X[c].
struct CascadeData {
  std::vector<Matrix> X;
  std::vector<Matrix> U;

  CascadeData() = default;
  CascadeData(std::vector<Matrix> x, std::vector<Matrix> u);
  CascadeData(Matrix x, Matrix u);

  Index n() const { return X.front().rows(); }
  Index t() const { return X.front().cols(); }
  Index cascades() const { return static_cast<Index>(X.size()); }
};

struct SemFit {
  ShiftOperator W;  // directed, W(i, j) is the influence of j on i
  Vector omega;
  SolveTrace trace;
};

/// Per node: 0.5 sum_t (x_it - sum_{j!=i} w_ij x_jt - omega_i u_it)^2 + alpha sum_j |w_ij|.
SemFit sem_fit(const CascadeData& data, double alpha, const SolverConfig& config = {});

struct SvarmFit {
  std::vector<Matrix> lags;  // W^(1) .. W^(L), original units
  ShiftOperator graph;       // directed unweighted, self-loops dropped
  SolveTrace trace;
};

double svarm_auto_lambda(Index n, Index lags, Index t);

/// Rows are centered and scaled before the per-node lasso on the stacked
/// lagged regressors; coefficients are mapped back to the original units.
SvarmFit svarm_fit(const Matrix& X, Index lags, double lambda, CombineRule rule, const SolverConfig& config = {});

struct GraphTrajectory {
  std::vector<Index> times;  // epochs at which W was emitted
  std::vector<Matrix> W;
  std::vector<Vector> omega;
  std::vector<Index> edge_counts;  // every epoch
  std::vector<double> objective;   // every epoch
  SolveTrace trace;
};

/// Weighted Gram of z = [x; u] over the first `epochs` columns of every cascade
/// with weight gamma^(last - t), computed from scratch.
Matrix weighted_gram(const CascadeData& data, double gamma, Index epochs);

/// g <- gamma g + sum_c z_t z_t' for column t of every cascade.
void update_gram(Matrix& g, const CascadeData& data, Index t, double gamma);

GraphTrajectory dynamic_sem_track(const CascadeData& data, double gamma, double alpha, const SolverConfig& config = {},
                                  Index stride = 1);

}  // namespace glk
