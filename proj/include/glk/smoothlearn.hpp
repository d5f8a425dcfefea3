#pragma once

// Graph learning from smooth signals: factor-analysis alternating
// minimization, log-barrier smoothness learning, Gaussian-kernel weights and
// exact edge-subset selection.

#include <utility>
#include <vector>

#include "glk/graph.hpp"
#include "glk/solvers.hpp"

namespace glk {

/// Z_ij = ||x_i - x_j||^2 over the rows of X.
Matrix distance_matrix(const SignalSet& X);

struct DongResult {
  Matrix laplacian;
  Matrix Y;
  SolveTrace trace;  // objective holds the outer-loop values
};

/// ||X - Y||_F^2 + alpha tr(Y' L Y) + beta/2 ||L||_F^2.
double dong_objective(const Matrix& X, const Matrix& Y, const Matrix& L, double alpha, double beta);

/// Alternates Y = (I + alpha L)^{-1} X with the L-step written over adjacency
/// weights: ||W o (alpha/2) Z_Y||_1 + beta/2 (||W 1||^2 + ||W||_F^2) with
/// ||W||_1 = N held exactly.
DongResult dong_learn(const SignalSet& X, double alpha, double beta, const SolverConfig& config = {},
                      int max_outer = 100);

GraphSolveResult kalofolias_learn(const Matrix& Z, double alpha, double beta, const SolverConfig& config = {});

struct SmoothPrior {
  enum class Kind { LogBarrier, GaussianEntropy };
  Kind kind = Kind::LogBarrier;
  double alpha = 1.0;
  double beta = 0.0;
  double sigma = 1.0;

  static SmoothPrior log_barrier(double a, double b) { return {Kind::LogBarrier, a, b, 1.0}; }
  static SmoothPrior gaussian_entropy(double s) { return {Kind::GaussianEntropy, 1.0, 0.0, s}; }
};

GraphSolveResult general_smooth_learn(const Matrix& Z, const SmoothPrior& prior, const SolverConfig& config = {});

struct EdgeSelection {
  std::vector<std::pair<Index, Index>> edges;  // chosen pairs, score order
  Vector scores;                               // one per pair i < j, row-major
  Matrix laplacian;                            // unweighted Laplacian of the selection
};

/// The K pairs with the smallest ||x_i - x_j||^2; ties broken by (i, j).
EdgeSelection edge_select(const SignalSet& X, Index k);

struct NoisyEdgeSelection {
  EdgeSelection selection;
  Matrix Y;
  SolveTrace trace;
};

NoisyEdgeSelection edge_select_noisy(const SignalSet& X, Index k, double alpha, int max_outer = 50);

}  // namespace glk
