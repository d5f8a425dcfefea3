#include "glk/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace glk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDykstraMaxIters = 20000;
constexpr double kFeasibilityTol = 1e-6;

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double upper_pairs(Index n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

void require_square(const Matrix& m, const char* what) {
  require(m.rows() == m.cols(), ErrorCode::BadDimension, std::string(what) + " must be square");
}

}  // namespace

void SolverConfig::validate() const {
  require(max_iters >= 1, ErrorCode::BadParameter, "max_iters must be >= 1");
  require(tol > 0.0 && std::isfinite(tol), ErrorCode::BadParameter, "tol must be positive");
  require(rho > 0.0 && std::isfinite(rho), ErrorCode::BadParameter, "rho must be positive");
  require(step_scale > 0.0 && step_scale < 1.0, ErrorCode::BadParameter, "step_scale must lie in (0, 1)");
  require(power_iters >= 1, ErrorCode::BadParameter, "power_iters must be >= 1");
  require(jobs >= 1, ErrorCode::BadParameter, "jobs must be >= 1");
}

// ---------------------------------------------------------------------------
// Lasso

double lasso_gram_objective(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                            const Vector& beta) {
  double pen = penalty_weights.size() == 0 ? beta.lpNorm<1>() : penalty_weights.cwiseProduct(beta.cwiseAbs()).sum();
  return 0.5 * beta.dot(gram * beta) - corr.dot(beta) + lambda * pen;
}

namespace {

double kkt_entry(double r, double beta, double thr) {
  if (thr == 0.0) return std::abs(r);
  if (beta == 0.0) return std::max(0.0, std::abs(r) - thr);
  return std::abs(r - thr * (beta > 0 ? 1.0 : -1.0));
}

}  // namespace

double lasso_kkt_violation(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                           const Vector& beta) {
  Vector r = corr - gram * beta;
  double worst = 0.0;
  for (Index k = 0; k < beta.size(); ++k) {
    double w = penalty_weights.size() == 0 ? 1.0 : penalty_weights(k);
    worst = std::max(worst, kkt_entry(r(k), beta(k), lambda * w));
  }
  return worst;
}

LassoResult lasso_cd_gram(const Matrix& gram, const Vector& corr, double lambda, const Vector& penalty_weights,
                          const SolverConfig& config, const Vector* warm_start) {
  config.validate();
  const Index k_dim = gram.rows();
  require_square(gram, "Gram matrix");
  require(k_dim >= 1, ErrorCode::BadDimension, "lasso needs at least one column");
  require(corr.size() == k_dim, ErrorCode::BadDimension, "correlation vector length mismatch");
  require(penalty_weights.size() == 0 || penalty_weights.size() == k_dim, ErrorCode::BadDimension,
          "penalty weight length mismatch");
  require(gram.allFinite() && corr.allFinite(), ErrorCode::BadInput, "lasso inputs must be finite");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::BadParameter, "lambda must be >= 0");
  if (penalty_weights.size() != 0)
    require((penalty_weights.array() >= 0.0).all(), ErrorCode::BadParameter, "penalty weights must be >= 0");

  LassoResult out;
  out.beta = Vector::Zero(k_dim);
  if (warm_start != nullptr) {
    require(warm_start->size() == k_dim, ErrorCode::BadDimension, "warm start length mismatch");
    out.beta = *warm_start;
  }
  auto weight = [&](Index k) { return penalty_weights.size() == 0 ? 1.0 : penalty_weights(k); };

  const double scale = std::max(corr.lpNorm<Eigen::Infinity>(), 1e-300);
  Vector r = corr - gram * out.beta;
  for (int it = 0; it < config.max_iters; ++it) {
    for (Index k = 0; k < k_dim; ++k) {
      double gkk = gram(k, k);
      double old = out.beta(k);
      double next = gkk > 0.0 ? soft_threshold(r(k) + gkk * old, lambda * weight(k)) / gkk : 0.0;
      if (next != old) {
        r.noalias() -= gram.col(k) * (next - old);
        out.beta(k) = next;
      }
    }
    r = corr - gram * out.beta;
    double kkt = 0.0;
    for (Index k = 0; k < k_dim; ++k)
      if (gram(k, k) > 0.0) kkt = std::max(kkt, kkt_entry(r(k), out.beta(k), lambda * weight(k)));
    out.trace.objective.push_back(lasso_gram_objective(gram, corr, lambda, penalty_weights, out.beta));
    out.trace.primal_residual.push_back(kkt);
    out.trace.iters_used = it + 1;
    if (kkt <= config.tol * scale) {
      out.trace.converged = true;
      break;
    }
  }
  return out;
}

LassoResult lasso_cd(const Matrix& A, const Vector& b, double lambda, const SolverConfig& config) {
  require(A.cols() >= 1, ErrorCode::BadDimension, "lasso needs at least one column");
  require(A.rows() == b.size(), ErrorCode::BadDimension, "lasso design/response length mismatch");
  require(A.allFinite() && b.allFinite(), ErrorCode::BadInput, "lasso inputs must be finite");
  Matrix gram = A.transpose() * A;
  Vector corr = A.transpose() * b;
  LassoResult out = lasso_cd_gram(gram, corr, lambda, Vector(), config);
  const double half_bb = 0.5 * b.squaredNorm();
  for (double& v : out.trace.objective) v += half_bb;
  return out;
}

// ---------------------------------------------------------------------------

Matrix prox_neg_logdet(const Matrix& A, const Matrix& cov, double rho) {
  require_square(A, "prox argument");
  require(A.rows() == cov.rows() && A.cols() == cov.cols(), ErrorCode::BadDimension, "prox dimension mismatch");
  require(rho > 0.0, ErrorCode::BadParameter, "rho must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(rho * A - cov));
  Vector g = es.eigenvalues();
  Vector theta(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    double root = std::sqrt(g(i) * g(i) + 4.0 * rho);
    // the two branches are the same number; the second avoids cancellation
    theta(i) = g(i) >= 0.0 ? (g(i) + root) / (2.0 * rho) : 2.0 / (root - g(i));
  }
  return sym(es.eigenvectors() * theta.asDiagonal() * es.eigenvectors().transpose());
}

// ---------------------------------------------------------------------------
// Constraint sets

double constraint_violation(const Matrix& S, const ShiftConstraintSet& set) {
  const Index n = S.rows();
  double v = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (set.kind == ShiftSetKind::AdjacencySet) {
    for (Index i = 0; i < n; ++i) {
      v = std::max(v, std::abs(S(i, i)));
      for (Index j = 0; j < n; ++j)
        if (i != j) v = std::max(v, -S(i, j));
    }
    if (set.scale == ScaleRule::FirstNodeDegreeOne) {
      v = std::max(v, std::abs(S.col(0).sum() - S(0, 0) - 1.0));
    } else {
      v = std::max(v, std::abs(S.sum() - S.trace() - static_cast<double>(n)));
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      v = std::max(v, std::abs(S.row(i).sum()));
      for (Index j = 0; j < n; ++j)
        if (i != j) v = std::max(v, S(i, j));
    }
    v = std::max(v, std::abs(S.trace() - static_cast<double>(n)));
  }
  return v;
}

namespace {

// Exact projection for the adjacency set: on symmetric matrices the Frobenius
// norm weights every upper-triangular pair equally, so the scale rule reduces
// to a simplex projection over the constrained pairs.
Matrix project_adjacency_set(const Matrix& X, ScaleRule scale) {
  const Index n = X.rows();
  Matrix Y = sym(X);
  Y.diagonal().setZero();
  if (scale == ScaleRule::FirstNodeDegreeOne) {
    Vector row = Y.row(0).tail(n - 1).transpose();
    Vector p = project_simplex(row, 1.0);
    for (Index j = 1; j < n; ++j) Y(0, j) = Y(j, 0) = p(j - 1);
    for (Index i = 1; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) Y(i, j) = Y(j, i) = std::max(0.0, Y(i, j));
  } else {
    Vector u(n * (n - 1) / 2);
    Index m = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) u(m++) = Y(i, j);
    u = project_simplex(u, 0.5 * static_cast<double>(n));
    m = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j, ++m) Y(i, j) = Y(j, i) = u(m);
  }
  return Y;
}

Matrix laplacian_affine(const Matrix& X) {
  const Index n = X.rows();
  Matrix Y = sym(X);
  Vector rm = Y.rowwise().mean();
  double gm = rm.mean();
  // P Y P with P = I - 11'/n
  Y.colwise() -= rm;
  Y.rowwise() -= rm.transpose();
  Y.array() += gm;
  double c = (static_cast<double>(n) - Y.trace()) / static_cast<double>(n - 1);
  Y.array() -= c / static_cast<double>(n);
  Y.diagonal().array() += c;
  return Y;
}

Matrix laplacian_box(const Matrix& X) {
  Matrix Y = X;
  for (Index i = 0; i < Y.rows(); ++i)
    for (Index j = 0; j < Y.cols(); ++j)
      if (i != j) Y(i, j) = std::min(0.0, Y(i, j));
  return Y;
}

}  // namespace

ProjectionResult dykstra_project_detail(const Matrix& S0, const ShiftConstraintSet& set, const SolverConfig& config) {
  config.validate();
  require_square(S0, "projection argument");
  require(S0.allFinite(), ErrorCode::BadInput, "projection argument must be finite");
  const Index n = S0.rows();
  if (n < 2) fail(ErrorCode::Infeasible, "constraint set is empty for fewer than two vertices");

  ProjectionResult out;
  if (set.kind == ShiftSetKind::AdjacencySet) {
    out.S = project_adjacency_set(S0, set.scale);
    out.iters = 1;
    out.converged = true;
    out.violation = constraint_violation(out.S, set);
    return out;
  }

  const double scale = std::max(1.0, S0.cwiseAbs().maxCoeff());
  Matrix x = sym(S0);
  Matrix p = Matrix::Zero(n, n);
  Matrix q = Matrix::Zero(n, n);
  for (int it = 0; it < kDykstraMaxIters; ++it) {
    Matrix y = laplacian_affine(x + p);
    p = x + p - y;
    Matrix xn = laplacian_box(y + q);
    q = y + q - xn;
    double gap = (xn - y).cwiseAbs().maxCoeff();
    double step = (xn - x).cwiseAbs().maxCoeff();
    x = std::move(xn);
    out.iters = it + 1;
    if (gap <= 1e-13 * scale && step <= 1e-13 * scale) {
      out.converged = true;
      break;
    }
  }
  // The box step is exact, so the affine equalities carry the residual error;
  // one more affine step followed by clipping keeps both within rounding.
  out.S = laplacian_box(laplacian_affine(x));
  out.violation = constraint_violation(out.S, set);
  if (out.violation > 1e-8 * scale) fail(ErrorCode::Infeasible, "projection onto the Laplacian set did not converge");
  return out;
}

Matrix dykstra_project(const Matrix& S0, const ShiftConstraintSet& set, const SolverConfig& config) {
  return dykstra_project_detail(S0, set, config).S;
}

// ---------------------------------------------------------------------------
// Spectral-template engine

Matrix project_onto_templates(const Matrix& M, const Matrix& templates) {
  require_square(M, "template projection argument");
  require(templates.rows() == M.rows(), ErrorCode::BadDimension, "template row count mismatch");
  Matrix Ms = sym(M);
  if (templates.cols() == 0) return Ms;
  const Matrix& V = templates;
  Matrix MV = Ms * V;
  Vector lam = (V.transpose() * MV).diagonal();
  // P M P with P = I - V V'
  Matrix PMP = Ms - V * MV.transpose() - MV * V.transpose() + V * (V.transpose() * MV) * V.transpose();
  return sym(PMP + V * lam.asDiagonal() * V.transpose());
}

double sparsity_objective(const Matrix& S, SparsityObjective objective) {
  switch (objective) {
    case SparsityObjective::L1: return S.cwiseAbs().sum();
    case SparsityObjective::Frobenius: return S.norm();
    case SparsityObjective::Linf: return S.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

namespace {

Matrix project_set(const Matrix& X, const ShiftConstraintSet& set, const SolverConfig& config) {
  return dykstra_project(X, set, config);
}

// On the constraint set the l1 norm is linear: <G, S>.
Matrix l1_gradient_on_set(Index n, const ShiftConstraintSet& set) {
  if (set.kind == ShiftSetKind::AdjacencySet) {
    Matrix G = Matrix::Ones(n, n);
    G.diagonal().setZero();
    return G;
  }
  Matrix G = -Matrix::Ones(n, n);
  G.diagonal().setOnes();
  return G;
}

// prox of t * max|entry| via the Moreau decomposition with an l1-ball projection.
Matrix prox_linf(const Matrix& V, double t) {
  Vector v = Eigen::Map<const Vector>(V.data(), V.size());
  if (v.lpNorm<1>() <= t) return Matrix::Zero(V.rows(), V.cols());
  Vector a = v.cwiseAbs();
  Vector p = project_simplex(a, t);
  Vector proj = p.cwiseProduct(v.cwiseSign());
  Vector r = v - proj;
  return Eigen::Map<const Matrix>(r.data(), V.rows(), V.cols());
}

Matrix s_step(const Matrix& A, double rho, const ShiftConstraintSet& set, SparsityObjective objective,
              const Matrix& G, const SolverConfig& config) {
  switch (objective) {
    case SparsityObjective::L1: return project_set(A - G / rho, set, config);
    case SparsityObjective::Frobenius: return project_set(A * (rho / (1.0 + rho)), set, config);
    case SparsityObjective::Linf: {
      // prox of f/rho + indicator, by the Dykstra-like splitting
      Matrix x = A;
      Matrix p = Matrix::Zero(A.rows(), A.cols());
      Matrix q = p;
      for (int it = 0; it < 200; ++it) {
        Matrix y = prox_linf(x + p, 1.0 / rho);
        p = x + p - y;
        Matrix xn = project_set(y + q, set, config);
        q = y + q - xn;
        double step = (xn - x).cwiseAbs().maxCoeff();
        x = std::move(xn);
        if (step <= 1e-12) break;
      }
      return x;
    }
  }
  return A;
}

struct TemplateCoords {
  Matrix V;  // N x K templates
  Matrix Q;  // N x (N-K) orthonormal complement
  Index dim() const {
    Index r = Q.cols();
    return V.cols() + r * (r + 1) / 2;
  }
};

TemplateCoords template_coords(const Matrix& templates) {
  const Index n = templates.rows();
  const Index k = templates.cols();
  TemplateCoords tc;
  tc.V = templates;
  if (k == 0) {
    tc.Q = Matrix::Identity(n, n);
  } else {
    Eigen::HouseholderQR<Matrix> qr(templates);
    Matrix full = qr.householderQ() * Matrix::Identity(n, n);
    tc.Q = full.rightCols(n - k);
  }
  return tc;
}

// Linear functional (i,j) entry of T(c) as a row over the coordinates.
void entry_row(const TemplateCoords& tc, Index i, Index j, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  const Index k = tc.V.cols();
  const Index r = tc.Q.cols();
  for (Index a = 0; a < k; ++a) row(a) = tc.V(i, a) * tc.V(j, a);
  Index m = k;
  const double s2 = std::sqrt(0.5);
  for (Index a = 0; a < r; ++a) {
    row(m++) = tc.Q(i, a) * tc.Q(j, a);
    for (Index b = a + 1; b < r; ++b) row(m++) = s2 * (tc.Q(i, a) * tc.Q(j, b) + tc.Q(i, b) * tc.Q(j, a));
  }
}

Vector coords_of(const TemplateCoords& tc, const Matrix& T) {
  const Index k = tc.V.cols();
  const Index r = tc.Q.cols();
  Vector c(tc.dim());
  for (Index a = 0; a < k; ++a) c(a) = tc.V.col(a).dot(T * tc.V.col(a));
  Matrix B = tc.Q.transpose() * T * tc.Q;
  Index m = k;
  const double s2 = std::sqrt(2.0);
  for (Index a = 0; a < r; ++a) {
    c(m++) = B(a, a);
    for (Index b = a + 1; b < r; ++b) c(m++) = s2 * 0.5 * (B(a, b) + B(b, a));
  }
  return c;
}

Matrix matrix_of(const TemplateCoords& tc, const Vector& c) {
  const Index k = tc.V.cols();
  const Index r = tc.Q.cols();
  Matrix B(r, r);
  Index m = k;
  const double s2 = std::sqrt(0.5);
  for (Index a = 0; a < r; ++a) {
    B(a, a) = c(m++);
    for (Index b = a + 1; b < r; ++b) B(a, b) = B(b, a) = s2 * c(m++);
  }
  Matrix T = tc.Q * B * tc.Q.transpose();
  if (k > 0) T += tc.V * c.head(k).asDiagonal() * tc.V.transpose();
  return sym(T);
}

// Given an (approximate) optimum inside the template subspace, guess the zero
// pattern, and move to the closest template matrix that satisfies it together
// with the linear constraints exactly.
std::optional<Matrix> polish(const Matrix& Z, const TemplateCoords& tc, const ShiftConstraintSet& set,
                             SparsityObjective objective, double reference) {
  const Index n = Z.rows();
  const Index d = tc.dim();
  double zmax = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) zmax = std::max(zmax, std::abs(Z(i, j)));
  if (zmax == 0.0) return std::nullopt;
  const Index max_rows = n * (n - 1) / 2 + n + 1;
  if (static_cast<double>(d) * static_cast<double>(max_rows) > 2e7) return std::nullopt;

  const Vector c0 = coords_of(tc, Z);
  std::optional<Matrix> best;
  // the ADMM iterate is only feasible to within its tolerances, so its
  // objective can sit slightly below the exact optimum
  double best_obj = reference + 1e-4 * std::max(1.0, std::abs(reference));
  for (double tau : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
    std::vector<std::pair<Index, Index>> zeros;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (std::abs(Z(i, j)) <= tau * zmax) zeros.emplace_back(i, j);
    const Index rows = static_cast<Index>(zeros.size()) + n + 1;
    Matrix F = Matrix::Zero(rows, d);
    Vector rhs = Vector::Zero(rows);
    Index r = 0;
    for (auto [i, j] : zeros) entry_row(tc, i, j, F.row(r++));
    Eigen::RowVectorXd tmp(d);
    if (set.kind == ShiftSetKind::AdjacencySet) {
      for (Index i = 0; i < n; ++i) entry_row(tc, i, i, F.row(r++));
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
      if (set.scale == ScaleRule::FirstNodeDegreeOne) {
        for (Index j = 1; j < n; ++j) {
          entry_row(tc, j, 0, tmp);
          acc += tmp;
        }
        rhs(r) = 1.0;
      } else {
        for (Index i = 0; i < n; ++i)
          for (Index j = i + 1; j < n; ++j) {
            entry_row(tc, i, j, tmp);
            acc += 2.0 * tmp;
          }
        rhs(r) = static_cast<double>(n);
      }
      F.row(r++) = acc;
    } else {
      for (Index i = 0; i < n; ++i) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
        for (Index j = 0; j < n; ++j) {
          entry_row(tc, i, j, tmp);
          acc += tmp;
        }
        F.row(r++) = acc;
      }
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
      for (Index i = 0; i < n; ++i) {
        entry_row(tc, i, i, tmp);
        acc += tmp;
      }
      F.row(r) = acc;
      rhs(r++) = static_cast<double>(n);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(F);
    Vector c = c0 + cod.solve(Vector(rhs - F * c0));
    if ((F * c - rhs).cwiseAbs().maxCoeff() > 1e-9) continue;
    Matrix S = matrix_of(tc, c);
    for (auto [i, j] : zeros) S(i, j) = S(j, i) = 0.0;
    if (set.kind == ShiftSetKind::AdjacencySet) S.diagonal().setZero();
    if (constraint_violation(S, set) > 1e-9 * std::max(1.0, S.cwiseAbs().maxCoeff())) continue;
    double obj = sparsity_objective(S, objective);
    if (obj <= best_obj) {
      best_obj = obj;
      best = std::move(S);
    }
  }
  return best;
}

}  // namespace

SpectralSolveResult admm_l1_spectral(const Matrix& templates, double eps, const ShiftConstraintSet& set,
                                     const SolverConfig& config, SparsityObjective objective) {
  config.validate();
  const Index n = templates.rows();
  const Index k = templates.cols();
  require(eps >= 0.0 && std::isfinite(eps), ErrorCode::BadParameter, "eps must be >= 0");
  require(templates.allFinite(), ErrorCode::BadInput, "templates must be finite");
  require(k <= n, ErrorCode::BadDimension, "more templates than vertices");
  if (n < 2) fail(ErrorCode::Infeasible, "constraint set is empty for fewer than two vertices");
  if (k > 0)
    require((templates.transpose() * templates - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8,
            ErrorCode::BadInput, "templates must be orthonormal");

  const Matrix G = l1_gradient_on_set(n, set);
  double rho = config.rho;
  Matrix S = Matrix::Zero(n, n);
  Matrix Z = Matrix::Zero(n, n);
  Matrix U = Matrix::Zero(n, n);

  SpectralSolveResult out;
  double prev_obj = kInf;
  double r_norm = kInf;
  for (int it = 0; it < config.max_iters; ++it) {
    S = s_step(Z - U, rho, set, objective, G, config);
    Matrix M = S + U;
    Matrix T = project_onto_templates(M, templates);
    Matrix R = M - T;
    double rn = R.norm();
    Matrix Zn = rn > eps ? Matrix(T + R * (eps / rn)) : M;
    U += S - Zn;
    r_norm = (S - Zn).norm();
    double s_norm = rho * (Zn - Z).norm();
    Z = std::move(Zn);

    double obj = sparsity_objective(S, objective);
    out.trace.objective.push_back(obj);
    out.trace.primal_residual.push_back(r_norm);
    out.trace.dual_residual.push_back(s_norm);
    out.trace.iters_used = it + 1;
    double rel = std::abs(obj - prev_obj) / std::max(1.0, std::abs(prev_obj));
    prev_obj = obj;
    double feas = kFeasibilityTol * std::max(1.0, S.norm());
    if (rel < config.tol && r_norm <= feas && s_norm <= feas) {
      out.trace.converged = true;
      break;
    }
    if (config.adaptive_rho) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        U /= 2.0;
      } else if (s_norm > 10.0 * r_norm) {
        rho /= 2.0;
        U *= 2.0;
      }
    }
  }

  double admm_obj = sparsity_objective(S, objective);
  if (eps == 0.0) {
    TemplateCoords tc = template_coords(templates);
    if (auto p = polish(Z, tc, set, objective, admm_obj)) {
      S = *p;
      out.polished = true;
    }
  }
  if (!out.polished && !out.trace.converged && r_norm > 1e-3 * std::max(1.0, S.norm()))
    fail(ErrorCode::Infeasible, "no shift in the constraint set is compatible with the spectral templates");
  if (!out.trace.converged && !out.polished)
    out.trace.warnings.push_back("ADMM reached the iteration cap before meeting the tolerances");

  out.S = S;
  out.eigenvalues = k > 0 ? Vector((templates.transpose() * S * templates).diagonal()) : Vector();
  out.objective = sparsity_objective(S, objective);
  out.template_distance = (S - project_onto_templates(S, templates)).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Primal-dual graph learner

namespace {

struct PairIndex {
  Index n;
  std::vector<std::pair<Index, Index>> pairs;
  explicit PairIndex(Index n_) : n(n_) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  Vector degrees(const Vector& w) const {
    Vector d = Vector::Zero(n);
    for (std::size_t m = 0; m < pairs.size(); ++m) {
      d(pairs[m].first) += w(m);
      d(pairs[m].second) += w(m);
    }
    return d;
  }
  Vector adjoint(const Vector& y) const {
    Vector w(pairs.size());
    for (std::size_t m = 0; m < pairs.size(); ++m) w(m) = y(pairs[m].first) + y(pairs[m].second);
    return w;
  }
  Vector vec(const Matrix& W) const {
    Vector w(pairs.size());
    for (std::size_t m = 0; m < pairs.size(); ++m) w(m) = W(pairs[m].first, pairs[m].second);
    return w;
  }
  Matrix mat(const Vector& w) const {
    Matrix W = Matrix::Zero(n, n);
    for (std::size_t m = 0; m < pairs.size(); ++m) W(pairs[m].first, pairs[m].second) = W(pairs[m].second, pairs[m].first) = w(m);
    return W;
  }
};

double degree_value(const Vector& d, const DegreeTerm& g) {
  if (g.kind == DegreeTerm::Kind::Quadratic) return 0.5 * g.weight * d.squaredNorm();
  if (g.weight == 0.0) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) return kInf;
    s += std::log(d(i));
  }
  return -g.weight * s;
}

Vector degree_gradient(const Vector& d, const DegreeTerm& g) {
  if (g.kind == DegreeTerm::Kind::Quadratic) return g.weight * d;
  Vector out(d.size());
  for (Index i = 0; i < d.size(); ++i) out(i) = g.weight == 0.0 ? 0.0 : -g.weight / std::max(d(i), 1e-300);
  return out;
}

double pd_objective(const PairIndex& pi, const Vector& w, const Vector& z, const DegreeTerm& g, double beta) {
  return 2.0 * z.dot(w) + degree_value(pi.degrees(w), g) + beta * w.squaredNorm();
}

}  // namespace

double graph_objective(const Matrix& W, const Matrix& Z, const DegreeTerm& degree, double beta) {
  Vector d = W.rowwise().sum();
  return W.cwiseProduct(Z).cwiseAbs().sum() + degree_value(d, degree) + 0.5 * beta * W.squaredNorm();
}

double degree_operator_norm(Index n, int iters, std::uint64_t seed) {
  require(n >= 2, ErrorCode::BadDimension, "need at least two vertices");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = unif(rng);
  double est = 0.0;
  const double nd = static_cast<double>(n);
  for (int it = 0; it < iters; ++it) {
    // K K' y = (n - 2) y + (1'y) 1
    Vector ky = (nd - 2.0) * y + Vector::Constant(n, y.sum());
    est = ky.norm() / y.norm();
    y = ky / ky.norm();
  }
  return std::sqrt(est);
}

GraphSolveResult primal_dual_graph(const Matrix& Z, const DegreeTerm& degree, double beta, const SolverConfig& config,
                                   const PrimalDualOptions& options) {
  config.validate();
  require_square(Z, "distance matrix");
  const Index n = Z.rows();
  require(n >= 2, ErrorCode::BadDimension, "need at least two vertices");
  require(Z.allFinite(), ErrorCode::BadInput, "distance matrix must be finite");
  require(is_symmetric(Z, 1e-9 * std::max(1.0, Z.cwiseAbs().maxCoeff())), ErrorCode::NotSymmetric,
          "distance matrix must be symmetric");
  require(beta >= 0.0 && std::isfinite(beta), ErrorCode::BadParameter, "beta must be >= 0");
  require(degree.weight >= 0.0 && std::isfinite(degree.weight), ErrorCode::BadParameter,
          "degree weight must be >= 0");
  if (options.total_weight)
    require(*options.total_weight > 0.0, ErrorCode::BadParameter, "total weight must be positive");

  const PairIndex pi(n);
  const Vector z = pi.vec(Z);
  require((z.array() >= 0.0).all(), ErrorCode::BadInput, "distances must be nonnegative");
  const double cap = options.weight_cap;
  const bool fixed_total = options.total_weight.has_value();
  const double half_total = fixed_total ? 0.5 * *options.total_weight : 0.0;

  GraphSolveResult out;
  if (!fixed_total && degree.weight == 0.0 && beta == 0.0) {
    out.W = Matrix::Zero(n, n);
    out.trace.converged = true;
    out.trace.warnings.push_back("degree and Frobenius weights are both zero; the empty graph is optimal");
    out.objective = graph_objective(out.W, Z, degree, beta);
    return out;
  }

  auto prox_f = [&](const Vector& y, double gamma) -> Vector {
    Vector v = y - 2.0 * gamma * z;
    if (fixed_total) return project_simplex(v, half_total);
    return v.cwiseMax(0.0).cwiseMin(cap);
  };
  auto prox_g_conj = [&](const Vector& y, double gamma) -> Vector {
    if (degree.kind == DegreeTerm::Kind::Quadratic) {
      if (degree.weight == 0.0) return Vector::Zero(y.size());
      return y * (degree.weight / (degree.weight + gamma));
    }
    Vector p(y.size());
    for (Index i = 0; i < y.size(); ++i) p(i) = 0.5 * (y(i) - std::sqrt(y(i) * y(i) + 4.0 * degree.weight * gamma));
    return p;
  };

  const double knorm = degree_operator_norm(n, config.power_iters, config.seed);
  const double gamma = config.step_scale / (knorm + 2.0 * beta);

  Vector w;
  if (options.warm_start != nullptr) {
    require(options.warm_start->rows() == n && options.warm_start->cols() == n, ErrorCode::BadDimension,
            "warm start dimension mismatch");
    w = pi.vec(*options.warm_start).cwiseMax(0.0);
    if (fixed_total) w = project_simplex(w, half_total);
  } else if (fixed_total) {
    w = Vector::Constant(static_cast<Index>(pi.pairs.size()), half_total / upper_pairs(n));
  } else {
    w = Vector::Zero(static_cast<Index>(pi.pairs.size()));
  }
  Vector d = Vector::Zero(n);

  auto kkt = [&](const Vector& wv) {
    Vector grad = 2.0 * z + pi.adjoint(degree_gradient(pi.degrees(wv), degree)) + 2.0 * beta * wv;
    Vector step = wv - grad;
    Vector proj = fixed_total ? project_simplex(step, half_total) : Vector(step.cwiseMax(0.0).cwiseMin(cap));
    return (wv - proj).lpNorm<Eigen::Infinity>() / std::max(1.0, wv.lpNorm<Eigen::Infinity>());
  };

  double prev_obj = kInf;
  for (int it = 0; it < config.max_iters; ++it) {
    Vector y = w - gamma * (2.0 * beta * w + pi.adjoint(d));
    Vector yb = d + gamma * pi.degrees(w);
    Vector p = prox_f(y, gamma);
    Vector pb = prox_g_conj(yb, gamma);
    Vector q = p - gamma * (2.0 * beta * p + pi.adjoint(pb));
    Vector qb = pb + gamma * pi.degrees(p);
    Vector wn = w - y + q;
    Vector dn = d - yb + qb;
    wn = fixed_total ? project_simplex(wn, half_total) : Vector(wn.cwiseMax(0.0));

    double dw = (wn - w).norm();
    double dd = (dn - d).norm();
    double rel_w = dw / std::max(wn.norm(), 1e-300);
    double rel_d = dd / std::max(dn.norm(), 1e-300);
    w = std::move(wn);
    d = std::move(dn);

    double obj = pd_objective(pi, w, z, degree, beta);
    if (std::isfinite(obj)) out.trace.objective.push_back(obj);
    out.trace.primal_residual.push_back(dw);
    out.trace.dual_residual.push_back(dd);
    out.trace.iters_used = it + 1;
    double rel_obj = std::isfinite(obj) && std::isfinite(prev_obj)
                         ? std::abs(obj - prev_obj) / std::max(1.0, std::abs(prev_obj))
                         : kInf;
    prev_obj = obj;
    if (rel_w < config.tol && rel_d < config.tol && rel_obj < config.tol && kkt(w) <= 1e-6) {
      out.trace.converged = true;
      break;
    }
  }
  if (!fixed_total && w.maxCoeff() >= cap)
    out.trace.warnings.push_back("weights reached the cap; the problem is likely unbounded");
  if (!out.trace.converged) out.trace.warnings.push_back("primal-dual iteration cap reached");

  out.W = pi.mat(w);
  out.kkt_residual = kkt(w);
  out.objective = graph_objective(out.W, Z, degree, beta);
  return out;
}

// ---------------------------------------------------------------------------
// Helpers

Matrix psd_sqrt(const Matrix& m) {
  require_square(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  Vector v = es.eigenvalues();
  double floor = 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff());
  for (Index i = 0; i < v.size(); ++i) v(i) = v(i) <= floor ? 0.0 : std::sqrt(v(i));
  return sym(es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose());
}

Matrix psd_inv_sqrt(const Matrix& m) {
  require_square(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  Vector v = es.eigenvalues();
  double floor = 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff());
  if (v.minCoeff() <= floor) fail(ErrorCode::SingularInputCovariance, "input covariance is not positive definite");
  for (Index i = 0; i < v.size(); ++i) v(i) = 1.0 / std::sqrt(v(i));
  return sym(es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose());
}

Matrix project_psd(const Matrix& m) {
  require_square(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  Vector v = es.eigenvalues().cwiseMax(0.0);
  return sym(es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose());
}

Vector project_simplex(const Vector& v, double total) {
  require(total > 0.0, ErrorCode::BadParameter, "simplex total must be positive");
  const Index n = v.size();
  require(n >= 1, ErrorCode::BadDimension, "empty vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cum += u[k];
    double t = (cum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

}  // namespace glk
