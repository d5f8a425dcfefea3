#include "glk/netdyn.hpp"

#include <cmath>

#include "glk/parallel.hpp"

namespace glk {

CascadeData::CascadeData(std::vector<Matrix> x, std::vector<Matrix> u) : X(std::move(x)), U(std::move(u)) {
  require(!X.empty(), ErrorCode::BadInput, "no cascades");
  require(X.size() == U.size(), ErrorCode::BadDimension, "inputs must match the cascades");
  const Index n = X.front().rows();
  const Index t = X.front().cols();
  require(n >= 2 && t >= 1, ErrorCode::BadDimension, "cascades need N >= 2 nodes and at least one column");
  for (size_t c = 0; c < X.size(); ++c) {
    require(X[c].rows() == n && X[c].cols() == t && U[c].rows() == n && U[c].cols() == t, ErrorCode::BadDimension,
            "all cascades and inputs must be N x T");
    require(X[c].allFinite() && U[c].allFinite(), ErrorCode::BadInput, "cascade data must be finite");
  }
}

CascadeData::CascadeData(Matrix x, Matrix u) : CascadeData(std::vector<Matrix>{std::move(x)}, std::vector<Matrix>{std::move(u)}) {}

namespace {

// Regressors of node i inside z = [x; u]: x_j for j != i, then u_i.
std::vector<Index> sem_regressors(Index n, Index i) {
  std::vector<Index> idx;
  for (Index j = 0; j < n; ++j)
    if (j != i) idx.push_back(j);
  idx.push_back(n + i);
  return idx;
}

Matrix gather(const Matrix& g, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  Matrix out(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) out(a, b) = g(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
  return out;
}

struct NodeState {
  Matrix W;
  Vector omega;
  double objective = 0.0;
  bool converged = true;
};

// Solves every node against the 2N x 2N Gram g; warm holds previous betas.
void solve_sem_nodes(const Matrix& g, double alpha, const SolverConfig& config, std::vector<Vector>& betas,
                     NodeState& st) {
  const Index n = g.rows() / 2;
  st.W = Matrix::Zero(n, n);
  st.omega = Vector::Zero(n);
  std::vector<double> obj(static_cast<size_t>(n), 0.0);
  std::vector<char> conv(static_cast<size_t>(n), 1);
  Vector weights = Vector::Ones(n);
  weights(n - 1) = 0.0;
  SolverConfig inner = config;
  inner.jobs = 1;
  parallel_for(n, config.jobs, [&](long li) {
    const Index i = static_cast<Index>(li);
    std::vector<Index> idx = sem_regressors(n, i);
    Matrix gi = gather(g, idx);
    Vector ci(n);
    for (Index a = 0; a < n; ++a) ci(a) = g(idx[static_cast<size_t>(a)], i);
    Vector& b = betas[static_cast<size_t>(i)];
    const Vector* warm = b.size() == n ? &b : nullptr;
    LassoResult r = lasso_cd_gram(gi, ci, alpha, weights, inner, warm);
    b = r.beta;
    obj[static_cast<size_t>(i)] = 0.5 * g(i, i) + lasso_gram_objective(gi, ci, alpha, weights, r.beta);
    conv[static_cast<size_t>(i)] = r.trace.converged ? 1 : 0;
  });
  st.objective = 0.0;
  st.converged = true;
  for (Index i = 0; i < n; ++i) {
    const Vector& b = betas[static_cast<size_t>(i)];
    std::vector<Index> idx = sem_regressors(n, i);
    for (Index a = 0; a + 1 < n; ++a) st.W(i, idx[static_cast<size_t>(a)]) = b(a);
    st.omega(i) = b(n - 1);
    st.objective += obj[static_cast<size_t>(i)];
    st.converged = st.converged && conv[static_cast<size_t>(i)];
  }
}

void add_column(Matrix& g, const CascadeData& data, Index t) {
  const Index n = data.n();
  Vector z(2 * n);
  for (Index c = 0; c < data.cascades(); ++c) {
    z.head(n) = data.X[static_cast<size_t>(c)].col(t);
    z.tail(n) = data.U[static_cast<size_t>(c)].col(t);
    g.noalias() += z * z.transpose();
  }
}

}  // namespace

SemFit sem_fit(const CascadeData& data, double alpha, const SolverConfig& config) {
  config.validate();
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorCode::BadParameter, "alpha must be >= 0");
  const Index n = data.n();
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  for (Index t = 0; t < data.t(); ++t) add_column(g, data, t);
  std::vector<Vector> betas(static_cast<size_t>(n));
  NodeState st;
  solve_sem_nodes(g, alpha, config, betas, st);
  SemFit out{ShiftOperator(st.W, ShiftKind::Generic, true), st.omega, {}};
  out.trace.objective.push_back(st.objective);
  out.trace.converged = st.converged;
  out.trace.iters_used = 1;
  if (!st.converged) out.trace.warnings.push_back("some node regressions hit the iteration cap");
  return out;
}

double svarm_auto_lambda(Index n, Index lags, Index t) {
  require(n >= 2 && lags >= 1 && t > lags, ErrorCode::BadParameter, "need N >= 2, L >= 1 and T > L");
  const double p = static_cast<double>(t - lags);
  return 2.0 * std::sqrt(p * std::log(static_cast<double>(n * lags)));
}

SvarmFit svarm_fit(const Matrix& X, Index lags, double lambda, CombineRule rule, const SolverConfig& config) {
  config.validate();
  const Index n = X.rows();
  const Index t = X.cols();
  require(n >= 2, ErrorCode::BadDimension, "need at least two series");
  require(lags >= 1, ErrorCode::BadParameter, "lag count must be >= 1");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::BadParameter, "lambda must be >= 0");
  require(X.allFinite(), ErrorCode::BadInput, "series must be finite");
  if (t <= lags + 1) fail(ErrorCode::TooFewSamples, "series too short for the lag order");

  Vector mean = X.rowwise().mean();
  Matrix Xc = X.colwise() - mean;
  Vector sd = (Xc.rowwise().squaredNorm() / static_cast<double>(t)).cwiseSqrt();
  for (Index i = 0; i < n; ++i) {
    if (sd(i) <= 0.0) fail(ErrorCode::BadInput, "series " + std::to_string(i) + " is constant");
    Xc.row(i) /= sd(i);
  }

  const Index p = t - lags;
  const Index k = n * lags;
  Matrix Z(k, p);  // row l*n + j holds x_j(t - l - 1)
  for (Index l = 0; l < lags; ++l) Z.middleRows(l * n, n) = Xc.middleCols(lags - 1 - l, p);
  Matrix Y = Xc.rightCols(p);
  Matrix G = Z * Z.transpose();
  Matrix C = Z * Y.transpose();

  std::vector<Vector> betas(static_cast<size_t>(n));
  std::vector<char> conv(static_cast<size_t>(n), 1);
  SolverConfig inner = config;
  inner.jobs = 1;
  parallel_for(n, config.jobs, [&](long li) {
    LassoResult r = lasso_cd_gram(G, C.col(li), lambda, Vector(), inner);
    betas[static_cast<size_t>(li)] = r.beta;
    conv[static_cast<size_t>(li)] = r.trace.converged ? 1 : 0;
  });

  std::vector<Matrix> w(static_cast<size_t>(lags), Matrix::Zero(n, n));
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < lags; ++l)
      for (Index j = 0; j < n; ++j)
        w[static_cast<size_t>(l)](i, j) = betas[static_cast<size_t>(i)](l * n + j) * sd(i) / sd(j);

  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      Index hits = 0;
      for (Index l = 0; l < lags; ++l) hits += w[static_cast<size_t>(l)](i, j) != 0.0 ? 1 : 0;
      bool edge = rule == CombineRule::Or ? hits > 0 : hits == lags;
      if (edge) A(i, j) = 1.0;
    }
  SvarmFit out{std::move(w), ShiftOperator(A, ShiftKind::Adjacency, true), {}};
  out.trace.converged = true;
  for (char c : conv) out.trace.converged = out.trace.converged && c;
  out.trace.iters_used = 1;
  if (!out.trace.converged) out.trace.warnings.push_back("some node regressions hit the iteration cap");
  return out;
}

Matrix weighted_gram(const CascadeData& data, double gamma, Index epochs) {
  const Index n = data.n();
  require(epochs >= 0 && epochs <= data.t(), ErrorCode::BadParameter, "epoch count out of range");
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  for (Index t = 0; t < epochs; ++t) {
    Matrix one = Matrix::Zero(2 * n, 2 * n);
    add_column(one, data, t);
    g += std::pow(gamma, static_cast<double>(epochs - 1 - t)) * one;
  }
  return g;
}

void update_gram(Matrix& g, const CascadeData& data, Index t, double gamma) {
  const Index n = data.n();
  require(g.rows() == 2 * n && g.cols() == 2 * n, ErrorCode::BadDimension, "Gram must be 2N x 2N");
  require(t >= 0 && t < data.t(), ErrorCode::BadParameter, "epoch out of range");
  g *= gamma;
  add_column(g, data, t);
}

GraphTrajectory dynamic_sem_track(const CascadeData& data, double gamma, double alpha, const SolverConfig& config,
                                  Index stride) {
  config.validate();
  require(gamma > 0.0 && gamma <= 1.0, ErrorCode::BadParameter, "forgetting factor must lie in (0, 1]");
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorCode::BadParameter, "alpha must be >= 0");
  require(stride >= 1, ErrorCode::BadParameter, "stride must be >= 1");
  const Index n = data.n();
  const Index tmax = data.t();

  GraphTrajectory out;
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  std::vector<Vector> betas(static_cast<size_t>(n));
  NodeState st;
  bool all_converged = true;
  for (Index t = 0; t < tmax; ++t) {
    update_gram(g, data, t, gamma);
    solve_sem_nodes(g, alpha, config, betas, st);
    all_converged = all_converged && st.converged;
    Index edges = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) edges += (i != j && st.W(i, j) != 0.0) ? 1 : 0;
    out.edge_counts.push_back(edges);
    out.objective.push_back(st.objective);
    if ((t + 1) % stride == 0 || t + 1 == tmax) {
      out.times.push_back(t);
      out.W.push_back(st.W);
      out.omega.push_back(st.omega);
    }
  }
  out.trace.objective = out.objective;
  out.trace.converged = all_converged;
  out.trace.iters_used = static_cast<int>(tmax);
  if (!all_converged) out.trace.warnings.push_back("some epoch regressions hit the iteration cap");
  return out;
}

}  // namespace glk
