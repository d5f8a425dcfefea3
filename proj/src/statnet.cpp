#include "glk/statnet.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "glk/parallel.hpp"

namespace glk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_cov(const Matrix& cov) {
  require(cov.rows() == cov.cols() && cov.rows() >= 2, ErrorCode::BadDimension, "covariance must be square, N >= 2");
  require(cov.allFinite(), ErrorCode::BadInput, "covariance must be finite");
  require(is_symmetric(cov, 1e-9 * std::max(1.0, cov.cwiseAbs().maxCoeff())), ErrorCode::NotSymmetric,
          "covariance must be symmetric");
}

double min_eig_ratio(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().cwiseAbs().maxCoeff();
  return top > 0.0 ? es.eigenvalues().minCoeff() / top : 0.0;
}

TestTable run_tests(const Matrix& rho, double null_var, double q, const std::string& method) {
  const Index n = rho.rows();
  TestTable table;
  table.method = method;
  table.q = q;
  std::vector<double> pv;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      PairTest t;
      t.i = i;
      t.j = j;
      double r = rho(i, j);
      if (std::abs(r) >= 1.0 - 1e-14) {
        t.saturated = true;
        t.statistic = std::copysign(kInf, r);
        t.p_value = 0.0;
      } else {
        t.statistic = std::atanh(r) / std::sqrt(null_var);
        t.p_value = fisher_p_value(r, null_var);
      }
      table.pairs.push_back(t);
      pv.push_back(t.p_value);
    }
  std::vector<bool> rej = benjamini_hochberg(pv, q);
  for (size_t k = 0; k < rej.size(); ++k) table.pairs[k].reject = rej[k];
  return table;
}

ShiftOperator graph_from_table(const TestTable& table, const Matrix& rho) {
  const Index n = rho.rows();
  Matrix W = Matrix::Zero(n, n);
  for (const PairTest& t : table.pairs)
    if (t.reject) W(t.i, t.j) = W(t.j, t.i) = std::min(1.0, std::abs(rho(t.i, t.j)));
  return ShiftOperator(std::move(W), ShiftKind::Adjacency);
}

}  // namespace

Matrix sample_covariance(const SignalSet& X, bool centered) {
  const Index p = X.p();
  if (centered) require(p >= 2, ErrorCode::TooFewSamples, "centered covariance needs at least two samples");
  Matrix D = X.data();
  if (centered) D.colwise() -= D.rowwise().mean();
  Matrix cov = (D * D.transpose()) / static_cast<double>(p);
  return 0.5 * (cov + cov.transpose());
}

std::vector<bool> benjamini_hochberg(const std::vector<double>& pvalues, double q) {
  require(q > 0.0 && q <= 1.0, ErrorCode::BadParameter, "FDR level must lie in (0, 1]");
  const size_t m = pvalues.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return pvalues[a] < pvalues[b]; });
  size_t k = 0;
  for (size_t r = 0; r < m; ++r)
    if (pvalues[order[r]] <= static_cast<double>(r + 1) * q / static_cast<double>(m)) k = r + 1;
  std::vector<bool> out(m, false);
  for (size_t r = 0; r < k; ++r) out[order[r]] = true;
  return out;
}

double fisher_p_value(double rho, double null_var) {
  require(null_var > 0.0, ErrorCode::BadParameter, "null variance must be positive");
  if (std::abs(rho) >= 1.0) return 0.0;
  double z = std::abs(std::atanh(rho)) / std::sqrt(null_var);
  return std::erfc(z / std::sqrt(2.0));
}

NetworkTest correlation_network(const SignalSet& X, double q) {
  const Index p = X.p();
  if (p <= 3) fail(ErrorCode::TooFewSamples, "correlation tests need P >= 4");
  Matrix cov = sample_covariance(X, true);
  const Index n = cov.rows();
  Matrix rho = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      double d = std::sqrt(cov(i, i) * cov(j, j));
      double r = d > 0.0 ? std::clamp(cov(i, j) / d, -1.0, 1.0) : 0.0;
      rho(i, j) = rho(j, i) = r;
    }
  TestTable table = run_tests(rho, 1.0 / static_cast<double>(p - 3), q, "pearson");
  ShiftOperator g = graph_from_table(table, rho);
  return {std::move(table), std::move(g)};
}

Matrix partial_correlations(const Matrix& precision) {
  require(precision.rows() == precision.cols(), ErrorCode::BadDimension, "precision must be square");
  const Index n = precision.rows();
  Matrix rho = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      double d = std::sqrt(precision(i, i) * precision(j, j));
      double r = d > 0.0 ? std::clamp(-precision(i, j) / d, -1.0, 1.0) : 0.0;
      rho(i, j) = rho(j, i) = r;
    }
  return rho;
}

NetworkTest partial_correlation_network(const SignalSet& X, double q, bool ridge) {
  const Index n = X.n();
  const Index p = X.p();
  if (!ridge && p <= n + 1) fail(ErrorCode::TooFewSamples, "partial correlation tests need P > N + 1 without ridge");
  if (p < 2) fail(ErrorCode::TooFewSamples, "need at least two samples");
  Matrix cov = sample_covariance(X, true);
  if (ridge) {
    cov.diagonal().array() += 1e-3 * cov.trace() / static_cast<double>(n);
  } else if (min_eig_ratio(cov) <= 1e-12) {
    fail(ErrorCode::SingularCovariance, "sample covariance is singular; enable the ridge");
  }
  Matrix theta = cov.ldlt().solve(Matrix::Identity(n, n));
  Matrix rho = partial_correlations(0.5 * (theta + theta.transpose()));
  double dof = std::max<double>(static_cast<double>(p - n - 1), 1.0);
  TestTable table = run_tests(rho, 1.0 / dof, q, "partial");
  ShiftOperator g = graph_from_table(table, rho);
  return {std::move(table), std::move(g)};
}

// ---------------------------------------------------------------------------
// Graphical lasso

double glasso_auto_lambda(Index n, Index p) {
  require(n >= 2 && p >= 1, ErrorCode::BadParameter, "need N >= 2 and P >= 1");
  return 2.0 * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(p));
}

namespace {

double l1_penalty(const Matrix& theta, bool penalize_diagonal) {
  double s = theta.cwiseAbs().sum();
  if (!penalize_diagonal) s -= theta.diagonal().cwiseAbs().sum();
  return s;
}

}  // namespace

double glasso_objective(const Matrix& theta, const Matrix& cov, double lambda, bool penalize_diagonal) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return kInf;
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -logdet + (cov.cwiseProduct(theta)).sum() + lambda * l1_penalty(theta, penalize_diagonal);
}

double glasso_kkt_residual(const Matrix& theta, const Matrix& cov, double lambda, bool penalize_diagonal) {
  const Index n = theta.rows();
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return kInf;
  Matrix G = cov - llt.solve(Matrix::Identity(n, n));
  double worst = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double thr = (i == j && !penalize_diagonal) ? 0.0 : lambda;
      double t = theta(i, j);
      double v = t == 0.0 ? std::max(0.0, std::abs(G(i, j)) - thr) : std::abs(G(i, j) + thr * (t > 0 ? 1.0 : -1.0));
      worst = std::max(worst, v);
    }
  return worst;
}

GlassoResult graphical_lasso(const Matrix& cov_in, double lambda, bool penalize_diagonal, const SolverConfig& config) {
  config.validate();
  require_cov(cov_in);
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::BadParameter, "lambda must be >= 0");
  const Matrix cov = 0.5 * (cov_in + cov_in.transpose());
  const Index n = cov.rows();
  if (lambda == 0.0 && min_eig_ratio(cov) <= 1e-10)
    fail(ErrorCode::NoMLE, "singular covariance has no maximum-likelihood precision without penalty");

  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  double rho = config.rho;
  Matrix Z = Matrix::Identity(n, n);
  Matrix U = Matrix::Zero(n, n);
  Matrix Theta = Z;
  GlassoResult out;
  double prev_obj = kInf;

  auto shrink = [&](const Matrix& A, double t) {
    Matrix out_m = A;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j || penalize_diagonal) out_m(i, j) = soft_threshold(A(i, j), t);
    return out_m;
  };
  auto pick = [&]() -> Matrix {
    Eigen::LLT<Matrix> llt(Z);
    return llt.info() == Eigen::Success ? Z : Theta;
  };

  for (int it = 0; it < config.max_iters; ++it) {
    Theta = prox_neg_logdet(Z - U, cov, rho);
    Matrix Zold = Z;
    Z = shrink(Theta + U, lambda / rho);
    U += Theta - Z;
    double r = (Theta - Z).norm();
    double s = rho * (Z - Zold).norm();
    double obj = glasso_objective(Theta, cov, lambda, penalize_diagonal);
    out.trace.objective.push_back(obj);
    out.trace.primal_residual.push_back(r);
    out.trace.dual_residual.push_back(s);
    out.trace.iters_used = it + 1;
    double rel = std::abs(obj - prev_obj) / std::max(1.0, std::abs(prev_obj));
    prev_obj = obj;
    double feas = 1e-6 * std::max(1.0, Theta.norm());
    if (rel < config.tol && r <= feas && s <= feas &&
        glasso_kkt_residual(pick(), cov, lambda, penalize_diagonal) <= 1e-6 * scale) {
      out.trace.converged = true;
      break;
    }
    if (config.adaptive_rho) {
      if (r > 10.0 * s) {
        rho *= 2.0;
        U /= 2.0;
      } else if (s > 10.0 * r) {
        rho /= 2.0;
        U *= 2.0;
      }
    }
  }
  out.theta = pick();
  out.theta = 0.5 * (out.theta + out.theta.transpose());
  out.kkt_residual = glasso_kkt_residual(out.theta, cov, lambda, penalize_diagonal);
  if (!out.trace.converged) out.trace.warnings.push_back("graphical lasso reached the iteration cap");
  return out;
}

// ---------------------------------------------------------------------------
// Laplacian-constrained GMRF

double laplacian_gmrf_objective(const Matrix& laplacian, double gamma, const Matrix& cov, double lambda) {
  const Index n = laplacian.rows();
  Matrix theta = laplacian + gamma * Matrix::Identity(n, n);
  return glasso_objective(theta, cov, lambda, true);
}

LaplacianGmrfResult laplacian_gmrf(const Matrix& cov_in, double lambda, const SolverConfig& config) {
  config.validate();
  require_cov(cov_in);
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::BadParameter, "lambda must be >= 0");
  const Matrix cov = 0.5 * (cov_in + cov_in.transpose());
  const Index n = cov.rows();
  require(cov.trace() > 0.0, ErrorCode::BadInput, "covariance must have positive trace");

  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const Index m = static_cast<Index>(pairs.size());
  // b_m' cov b_m for b_m = e_i - e_j
  Vector lin(m + 1);
  for (Index k = 0; k < m; ++k) {
    auto [i, j] = pairs[static_cast<size_t>(k)];
    lin(k) = cov(i, i) + cov(j, j) - 2.0 * cov(i, j) + 4.0 * lambda;
  }
  lin(m) = cov.trace() + static_cast<double>(n) * lambda;

  auto theta_of = [&](const Vector& x) {
    Matrix th = Matrix::Zero(n, n);
    for (Index k = 0; k < m; ++k) {
      auto [i, j] = pairs[static_cast<size_t>(k)];
      th(i, j) = th(j, i) = -x(k);
      th(i, i) += x(k);
      th(j, j) += x(k);
    }
    th.diagonal().array() += x(m);
    return th;
  };
  // Returns the objective and fills grad; +inf off the positive definite cone.
  auto eval = [&](const Vector& x, Vector* grad) {
    Matrix th = theta_of(x);
    Eigen::LLT<Matrix> llt(th);
    if (llt.info() != Eigen::Success) return kInf;
    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (grad != nullptr) {
      Matrix C = llt.solve(Matrix::Identity(n, n));
      grad->resize(m + 1);
      for (Index k = 0; k < m; ++k) {
        auto [i, j] = pairs[static_cast<size_t>(k)];
        (*grad)(k) = lin(k) - (C(i, i) + C(j, j) - 2.0 * C(i, j));
      }
      (*grad)(m) = lin(m) - C.trace();
    }
    return -logdet + lin.dot(x);
  };
  auto project = [](Vector x) { return Vector(x.cwiseMax(0.0)); };

  Vector x = Vector::Zero(m + 1);
  x(m) = static_cast<double>(n) / lin(m);
  Vector g;
  double f = eval(x, &g);
  double step = 1.0;
  LaplacianGmrfResult out;
  for (int it = 0; it < config.max_iters; ++it) {
    double res = (x - project(x - g)).lpNorm<Eigen::Infinity>() / std::max(1.0, x.lpNorm<Eigen::Infinity>());
    out.trace.primal_residual.push_back(res);
    if (res <= 1e-9) {
      out.trace.converged = true;
      break;
    }
    Vector xn;
    double fn = kInf;
    Vector gn;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = project(x - step * g);
      fn = eval(xn, &gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.trace.warnings.push_back("line search stalled");
      break;
    }
    Vector s = xn - x;
    Vector y = gn - g;
    double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(step * 2.0, 1e10);
    double rel = std::abs(fn - f) / std::max(1.0, std::abs(f));
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
    out.trace.objective.push_back(f);
    out.trace.iters_used = it + 1;
    if (rel < config.tol * 1e-3 && s.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      out.trace.converged = true;
      break;
    }
  }
  if (!out.trace.converged) out.trace.warnings.push_back("Laplacian GMRF reached the iteration cap");
  Matrix th = theta_of(x);
  out.gamma = x(m);
  out.laplacian = th - out.gamma * Matrix::Identity(n, n);
  out.objective = f;
  return out;
}

// ---------------------------------------------------------------------------
// Neighborhood lasso

double neighborhood_auto_lambda(Index n, Index p) {
  require(n >= 2 && p >= 1, ErrorCode::BadParameter, "need N >= 2 and P >= 1");
  return 2.0 * std::sqrt(static_cast<double>(p) * std::log(static_cast<double>(n)));
}

NeighborhoodResult neighborhood_lasso(const SignalSet& X, double lambda, CombineRule rule, const SolverConfig& config) {
  config.validate();
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::BadParameter, "lambda must be >= 0");
  require(X.p() >= 2, ErrorCode::TooFewSamples, "neighborhood lasso needs P >= 2");
  const Index n = X.n();
  Matrix D = X.data();
  D.colwise() -= D.rowwise().mean();
  for (Index i = 0; i < n; ++i) {
    double sd = std::sqrt(D.row(i).squaredNorm() / static_cast<double>(X.p()));
    if (sd > 0.0) D.row(i) /= sd;
  }
  const Matrix gram = D * D.transpose();

  Matrix B = Matrix::Zero(n, n);
  std::vector<char> conv(static_cast<size_t>(n), 0);
  parallel_for(n, config.jobs, [&](long node) {
    const Index i = node;
    std::vector<Index> others;
    for (Index j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    const Index k = static_cast<Index>(others.size());
    Matrix G(k, k);
    Vector c(k);
    for (Index a = 0; a < k; ++a) {
      c(a) = gram(others[static_cast<size_t>(a)], i);
      for (Index b = 0; b < k; ++b) G(a, b) = gram(others[static_cast<size_t>(a)], others[static_cast<size_t>(b)]);
    }
    LassoResult r = lasso_cd_gram(G, c, lambda, Vector(), config);
    for (Index a = 0; a < k; ++a) B(i, others[static_cast<size_t>(a)]) = r.beta(a);
    conv[static_cast<size_t>(i)] = r.trace.converged ? 1 : 0;
  });

  Matrix W = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      bool a = B(i, j) != 0.0;
      bool b = B(j, i) != 0.0;
      bool edge = rule == CombineRule::Or ? (a || b) : (a && b);
      if (edge) W(i, j) = W(j, i) = 1.0;
    }
  return {ShiftOperator(std::move(W), ShiftKind::Adjacency), std::move(B),
          std::vector<bool>(conv.begin(), conv.end())};
}

}  // namespace glk
