#pragma once

// Statistical network inference: correlation and partial-correlation tests
// with false-discovery-rate control, graphical lasso, Laplacian-constrained
// GMRF estimation and neighborhood lasso selection.

#include <string>
#include <vector>

#include "glk/graph.hpp"
#include "glk/solvers.hpp"

namespace glk {

/// (1/P) sum_p x_p x_p', after removing the per-vertex mean when centered.
Matrix sample_covariance(const SignalSet& X, bool centered = true);

struct PairTest {
  Index i = 0;
  Index j = 0;
  double statistic = 0.0;  // Fisher z scaled to unit null variance
  double p_value = 1.0;
  bool reject = false;
  bool saturated = false;  // |rho| == 1; p-value forced to 0
};

struct TestTable {
  std::vector<PairTest> pairs;  // every i < j once, row-major order
  std::string method;
  double q = 0.0;
};

struct NetworkTest {
  TestTable table;
  ShiftOperator graph;  // adjacency with |rho| on rejected pairs
};

/// Step-up rule: rejects the k smallest p-values, k the largest index with
/// p_(k) <= k q / m and m = pvalues.size().
std::vector<bool> benjamini_hochberg(const std::vector<double>& pvalues, double q);

/// Two-sided p-value of atanh(rho) against Normal(0, null_var).
double fisher_p_value(double rho, double null_var);

NetworkTest correlation_network(const SignalSet& X, double q);

/// rho_ij = -theta_ij / sqrt(theta_ii theta_jj); unit diagonal.
Matrix partial_correlations(const Matrix& precision);

/// With ridge, the covariance is loaded by 1e-3 trace / N before inversion
/// and the null variance uses max(P - N - 1, 1) degrees of freedom.
NetworkTest partial_correlation_network(const SignalSet& X, double q, bool ridge = false);

struct GlassoResult {
  Matrix theta;
  SolveTrace trace;
  double kkt_residual = 0.0;
};

/// 2 sqrt(log N / P).
double glasso_auto_lambda(Index n, Index p);

double glasso_objective(const Matrix& theta, const Matrix& cov, double lambda, bool penalize_diagonal);
double glasso_kkt_residual(const Matrix& theta, const Matrix& cov, double lambda, bool penalize_diagonal);

GlassoResult graphical_lasso(const Matrix& cov, double lambda, bool penalize_diagonal = false,
                             const SolverConfig& config = {});

struct LaplacianGmrfResult {
  Matrix laplacian;
  double gamma = 0.0;
  SolveTrace trace;
  double objective = 0.0;
};

/// -logdet(L + g I) + trace(cov (L + g I)) + lambda ||L + g I||_1, the negated
/// log-likelihood being minimized; +inf when L + g I is not positive definite.
double laplacian_gmrf_objective(const Matrix& laplacian, double gamma, const Matrix& cov, double lambda);

LaplacianGmrfResult laplacian_gmrf(const Matrix& cov, double lambda, const SolverConfig& config = {});

enum class CombineRule { Or, And };

struct NeighborhoodResult {
  ShiftOperator graph;  // unweighted symmetric adjacency
  Matrix coefficients;  // row i holds beta^(i), zero diagonal
  std::vector<bool> converged;
};

/// 2 sqrt(P log N), the graphical-lasso rate rescaled to summed squared
/// errors on standardized rows.
double neighborhood_auto_lambda(Index n, Index p);

/// Rows are centered and scaled to unit variance before the per-node lasso
/// fits 0.5 ||x_i - X_{-i}' beta||^2 + lambda ||beta||_1.
NeighborhoodResult neighborhood_lasso(const SignalSet& X, double lambda, CombineRule rule,
                                      const SolverConfig& config = {});

}  // namespace glk
