#include "glk/smoothlearn.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace glk {

Matrix distance_matrix(const SignalSet& X) {
  const Matrix& D = X.data();
  const Index n = D.rows();
  Matrix Z = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) Z(i, j) = Z(j, i) = (D.row(i) - D.row(j)).squaredNorm();
  return Z;
}

double dong_objective(const Matrix& X, const Matrix& Y, const Matrix& L, double alpha, double beta) {
  return (X - Y).squaredNorm() + alpha * (Y.transpose() * L * Y).trace() + 0.5 * beta * L.squaredNorm();
}

namespace {

Matrix smooth_step(const Matrix& L, double alpha, const Matrix& X) {
  const Index n = L.rows();
  Matrix A = Matrix::Identity(n, n) + alpha * L;
  return Eigen::LLT<Matrix>(A).solve(X);
}

}  // namespace

DongResult dong_learn(const SignalSet& X, double alpha, double beta, const SolverConfig& config, int max_outer) {
  config.validate();
  require(alpha > 0.0 && beta > 0.0, ErrorCode::BadParameter, "alpha and beta must be positive");
  require(max_outer >= 1, ErrorCode::BadParameter, "max_outer must be >= 1");
  const Index n = X.n();
  const double nd = static_cast<double>(n);

  DongResult out;
  out.Y = X.data();
  Matrix W = Matrix::Constant(n, n, 1.0 / (nd - 1.0));
  W.diagonal().setZero();
  out.laplacian = laplacian_from_adjacency(W);
  double prev = dong_objective(X.data(), out.Y, out.laplacian, alpha, beta);

  PrimalDualOptions opts;
  opts.total_weight = nd;
  for (int it = 0; it < max_outer; ++it) {
    Matrix Zy = distance_matrix(SignalSet(out.Y));
    opts.warm_start = &W;
    GraphSolveResult g = primal_dual_graph(0.5 * alpha * Zy, DegreeTerm::quadratic(beta), beta, config, opts);
    W = g.W;
    out.laplacian = laplacian_from_adjacency(W);
    out.Y = smooth_step(out.laplacian, alpha, X.data());
    double obj = dong_objective(X.data(), out.Y, out.laplacian, alpha, beta);
    out.trace.objective.push_back(obj);
    out.trace.iters_used = it + 1;
    if (!g.trace.converged) out.trace.warnings.push_back("L-step " + std::to_string(it) + " hit its iteration cap");
    double rel = std::abs(prev - obj) / std::max(1.0, std::abs(prev));
    prev = obj;
    if (rel < 1e-8) {
      out.trace.converged = true;
      break;
    }
  }
  if (!out.trace.converged) out.trace.warnings.push_back("outer loop reached its cap");
  return out;
}

GraphSolveResult kalofolias_learn(const Matrix& Z, double alpha, double beta, const SolverConfig& config) {
  require(alpha > 0.0, ErrorCode::BadParameter, "alpha must be positive");
  require(beta >= 0.0, ErrorCode::BadParameter, "beta must be >= 0");
  return primal_dual_graph(Z, DegreeTerm::log_barrier(alpha), beta, config);
}

GraphSolveResult general_smooth_learn(const Matrix& Z, const SmoothPrior& prior, const SolverConfig& config) {
  if (prior.kind == SmoothPrior::Kind::LogBarrier) return kalofolias_learn(Z, prior.alpha, prior.beta, config);
  require(prior.sigma > 0.0 && std::isfinite(prior.sigma), ErrorCode::BadParameter, "sigma must be positive");
  require(Z.rows() == Z.cols(), ErrorCode::BadDimension, "distance matrix must be square");
  const double s2 = prior.sigma * prior.sigma;
  GraphSolveResult out;
  out.W = (-Z.array() / s2).exp().matrix();
  out.W.diagonal().setZero();
  out.trace.converged = true;
  out.trace.iters_used = 0;
  double ent = 0.0;
  for (Index i = 0; i < Z.rows(); ++i)
    for (Index j = 0; j < Z.cols(); ++j)
      if (i != j && out.W(i, j) > 0.0) ent += out.W(i, j) * (std::log(out.W(i, j)) - 1.0);
  out.objective = out.W.cwiseProduct(Z).sum() + s2 * ent;
  return out;
}

EdgeSelection edge_select(const SignalSet& X, Index k) {
  const Index n = X.n();
  const Index m = n * (n - 1) / 2;
  if (k < 1 || k > m) fail(ErrorCode::BadK, "edge count must lie in [1, N(N-1)/2]");
  Matrix Z = distance_matrix(X);
  std::vector<std::pair<Index, Index>> pairs;
  EdgeSelection out;
  out.scores.resize(m);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      out.scores(static_cast<Index>(pairs.size())) = Z(i, j);
      pairs.emplace_back(i, j);
    }
  std::vector<Index> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  // pairs are already in (i, j) order, so a stable sort keeps the tie-break
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return out.scores(a) < out.scores(b); });
  Matrix W = Matrix::Zero(n, n);
  for (Index r = 0; r < k; ++r) {
    auto [i, j] = pairs[static_cast<size_t>(order[static_cast<size_t>(r)])];
    out.edges.emplace_back(i, j);
    W(i, j) = W(j, i) = 1.0;
  }
  out.laplacian = laplacian_from_adjacency(W);
  return out;
}

NoisyEdgeSelection edge_select_noisy(const SignalSet& X, Index k, double alpha, int max_outer) {
  require(alpha > 0.0, ErrorCode::BadParameter, "alpha must be positive");
  require(max_outer >= 1, ErrorCode::BadParameter, "max_outer must be >= 1");
  NoisyEdgeSelection out;
  out.Y = X.data();
  out.selection = edge_select(X, k);
  for (int it = 0; it < max_outer; ++it) {
    out.Y = smooth_step(out.selection.laplacian, alpha, X.data());
    EdgeSelection next = edge_select(SignalSet(out.Y), k);
    out.trace.iters_used = it + 1;
    bool same = next.edges.size() == out.selection.edges.size();
    if (same) {
      auto a = next.edges;
      auto b = out.selection.edges;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      same = a == b;
    }
    out.selection = std::move(next);
    out.trace.objective.push_back(dong_objective(X.data(), out.Y, out.selection.laplacian, alpha, 0.0));
    if (same) {
      out.trace.converged = true;
      break;
    }
  }
  if (!out.trace.converged) out.trace.warnings.push_back("outer loop reached its cap");
  return out;
}

}  // namespace glk
