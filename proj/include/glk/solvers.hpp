#pragma once

// Optimization kernels shared by the learners: covariance-update lasso,
// log-det proximal step, Dykstra projection onto shift constraint sets, the
// ADMM spectral-template engine and the primal-dual graph learner.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glk/graph.hpp"

namespace glk {

struct SolverConfig {
  int max_iters = 5000;
  double tol = 1e-7;
  double rho = 1.0;
  bool adaptive_rho = false;  // residual balancing: factor 2 when residual ratio exceeds 10
  double step_scale = 0.9;    // primal-dual step = step_scale / operator norm
  int power_iters = 50;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct SolveTrace {
  std::vector<double> objective;
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  bool converged = false;
  int iters_used = 0;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Lasso by cyclic coordinate descent.
//
// Minimizes 0.5 ||b - A beta||^2 + lambda * sum_k w_k |beta_k|. The Gram form
// takes G = A'A and c = A'b directly, so callers holding weighted or
// recursively updated second moments can reuse it.

struct LassoResult {
  Vector beta;
  SolveTrace trace;
};

LassoResult lasso_cd(const Matrix& A, const Vector& b, double lambda, const SolverConfig& config = {});

/// penalty_weights may be empty (all ones); a zero weight leaves a coordinate
/// unpenalized. warm_start may be null.
LassoResult lasso_cd_gram(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                          const SolverConfig& config = {}, const Vector* warm_start = nullptr);

/// 0.5 b'b is not known in Gram form, so the reported objective omits it.
double lasso_gram_objective(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                            const Vector& beta);

/// Largest violation of the lasso optimality conditions in Gram form.
double lasso_kkt_violation(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                           const Vector& beta);

inline double soft_threshold(double v, double t) {
  return v > t ? v - t : (v < -t ? v + t : 0.0);
}

// ---------------------------------------------------------------------------

/// argmin_{Theta > 0} -logdet Theta + tr(cov Theta) + rho/2 ||Theta - A||_F^2.
Matrix prox_neg_logdet(const Matrix& A, const Matrix& cov, double rho);

// ---------------------------------------------------------------------------
// Shift constraint sets.

enum class ShiftSetKind { AdjacencySet, LaplacianSet };
enum class ScaleRule { FirstNodeDegreeOne, TotalWeightN };

struct ShiftConstraintSet {
  ShiftSetKind kind = ShiftSetKind::AdjacencySet;
  ScaleRule scale = ScaleRule::FirstNodeDegreeOne;
};

/// Largest constraint violation of S with respect to the set.
double constraint_violation(const Matrix& S, const ShiftConstraintSet& set);

struct ProjectionResult {
  Matrix S;
  int iters = 0;
  bool converged = false;
  double violation = 0.0;
};

/// Euclidean projection onto the constraint set by Dykstra's alternating
/// projections between its affine hull and the sign constraints.
ProjectionResult dykstra_project_detail(const Matrix& S0, const ShiftConstraintSet& set,
                                        const SolverConfig& config = {});
Matrix dykstra_project(const Matrix& S0, const ShiftConstraintSet& set, const SolverConfig& config = {});

// ---------------------------------------------------------------------------
// Spectral-template engine.

enum class SparsityObjective { L1, Frobenius, Linf };

struct SpectralSolveResult {
  Matrix S;
  Vector eigenvalues;  // one per template column
  SolveTrace trace;
  double objective = 0.0;
  double template_distance = 0.0;  // ||S - Proj_templates(S)||_F
  bool polished = false;
};

/// Solves min f(S) s.t. S in set, ||S - T||_F <= eps, where T ranges over
/// symmetric matrices having every column of `templates` (N x K, orthonormal)
/// as an eigenvector. K = N gives the full-basis problem; K = 0 leaves the
/// spectral constraint vacuous.
SpectralSolveResult admm_l1_spectral(const Matrix& templates, double eps, const ShiftConstraintSet& set,
                                     const SolverConfig& config = {},
                                     SparsityObjective objective = SparsityObjective::L1);

/// Projection onto {T sym : T v_k = lambda_k v_k for all template columns}.
Matrix project_onto_templates(const Matrix& M, const Matrix& templates);

double sparsity_objective(const Matrix& S, SparsityObjective objective);

// ---------------------------------------------------------------------------
// Primal-dual learner over the upper-triangular weight vector.
//
//   min_W ||W o Z||_1 + g(W 1) + beta/2 ||W||_F^2
//   s.t. W symmetric, nonnegative, zero diagonal [, ||W||_1 = total_weight]
//
// g is either the log barrier -alpha 1' log(d) or the quadratic
// (gamma/2) ||d||^2 on the degree vector d = W 1.

struct DegreeTerm {
  enum class Kind { LogBarrier, Quadratic };
  Kind kind = Kind::LogBarrier;
  double weight = 1.0;  // alpha for LogBarrier, gamma for Quadratic

  static DegreeTerm log_barrier(double alpha) { return {Kind::LogBarrier, alpha}; }
  static DegreeTerm quadratic(double gamma) { return {Kind::Quadratic, gamma}; }
};

struct GraphSolveResult {
  Matrix W;
  SolveTrace trace;
  double kkt_residual = 0.0;
  double objective = 0.0;
};

struct PrimalDualOptions {
  std::optional<double> total_weight;  // enforce ||W||_1 = value
  double weight_cap = 1e6;
  const Matrix* warm_start = nullptr;
};

GraphSolveResult primal_dual_graph(const Matrix& Z, const DegreeTerm& degree, double beta,
                                   const SolverConfig& config = {}, const PrimalDualOptions& options = {});

double graph_objective(const Matrix& W, const Matrix& Z, const DegreeTerm& degree, double beta);

// ---------------------------------------------------------------------------
// Small helpers shared across modules.

/// Symmetric matrix function through the eigendecomposition, eigenvalues
/// clipped at zero first (tolerance 1e-10 relative).
Matrix psd_sqrt(const Matrix& m);
Matrix psd_inv_sqrt(const Matrix& m);  // throws SingularInputCovariance if not PD
Matrix project_psd(const Matrix& m);

/// Euclidean projection of v onto {x >= 0, sum x = total}.
Vector project_simplex(const Vector& v, double total);

/// Spectral norm of the vertex-degree map K (K w = W 1) of the complete graph
/// on n vertices, by power iteration on K'K.
double degree_operator_norm(Index n, int iters, std::uint64_t seed);

}  // namespace glk
