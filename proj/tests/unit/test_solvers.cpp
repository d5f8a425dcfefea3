#include <algorithm>
#include <cmath>
#include <limits>

#include "glk/solvers.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

namespace {

// Enumerates every sign pattern in {-1, 0, +1}^K and keeps the consistent
// candidate with the smallest objective.
Vector lasso_brute_force(const Matrix& G, const Vector& c, double lambda) {
  const Index k = G.rows();
  Vector best = Vector::Zero(k);
  double best_obj = lasso_gram_objective(G, c, lambda, Vector(), best);
  int total = 1;
  for (Index i = 0; i < k; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> s(static_cast<size_t>(k));
    int rest = code;
    std::vector<Index> active;
    for (Index i = 0; i < k; ++i) {
      s[static_cast<size_t>(i)] = rest % 3 - 1;
      rest /= 3;
      if (s[static_cast<size_t>(i)] != 0) active.push_back(i);
    }
    if (active.empty()) continue;
    const Index a = static_cast<Index>(active.size());
    Matrix ga(a, a);
    Vector rhs(a);
    for (Index p = 0; p < a; ++p) {
      rhs(p) = c(active[p]) - lambda * s[static_cast<size_t>(active[p])];
      for (Index q = 0; q < a; ++q) ga(p, q) = G(active[p], active[q]);
    }
    Vector sol = ga.ldlt().solve(rhs);
    Vector beta = Vector::Zero(k);
    bool consistent = true;
    for (Index p = 0; p < a; ++p) {
      beta(active[p]) = sol(p);
      if (sol(p) * s[static_cast<size_t>(active[p])] <= 0.0) consistent = false;
    }
    if (!consistent) continue;
    double obj = lasso_gram_objective(G, c, lambda, Vector(), beta);
    if (obj < best_obj) {
      best_obj = obj;
      best = beta;
    }
  }
  return best;
}

// Plain projected gradient with backtracking on the upper-triangular weights.
double log_barrier_oracle(const Matrix& Z, double alpha, double beta, Matrix& W_out) {
  const Index n = Z.rows();
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const Index m = static_cast<Index>(pairs.size());
  auto degrees = [&](const Vector& w) {
    Vector d = Vector::Zero(n);
    for (Index e = 0; e < m; ++e) {
      d(pairs[e].first) += w(e);
      d(pairs[e].second) += w(e);
    }
    return d;
  };
  auto f = [&](const Vector& w) {
    Vector d = degrees(w);
    if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    double v = beta * w.squaredNorm() - alpha * d.array().log().sum();
    for (Index e = 0; e < m; ++e) v += 2.0 * Z(pairs[e].first, pairs[e].second) * w(e);
    return v;
  };
  Vector w = Vector::Constant(m, 1.0);
  double step = 1.0;
  for (int it = 0; it < 200000; ++it) {
    Vector d = degrees(w);
    Vector g(m);
    for (Index e = 0; e < m; ++e)
      g(e) = 2.0 * Z(pairs[e].first, pairs[e].second) + 2.0 * beta * w(e) -
             alpha * (1.0 / d(pairs[e].first) + 1.0 / d(pairs[e].second));
    double fw = f(w);
    step = std::min(step * 2.0, 1.0);
    Vector next;
    while (true) {
      next = (w - step * g).cwiseMax(0.0);
      if (f(next) <= fw + g.dot(next - w) + 0.5 / step * (next - w).squaredNorm()) break;
      step *= 0.5;
    }
    double move = (next - w).norm();
    w = next;
    if (move < 1e-13) break;
  }
  W_out = Matrix::Zero(n, n);
  for (Index e = 0; e < m; ++e) W_out(pairs[e].first, pairs[e].second) = W_out(pairs[e].second, pairs[e].first) = w(e);
  return f(w);
}

Matrix random_feasible(Index n, const ShiftConstraintSet& set, Rng& rng) {
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.bernoulli(0.6) ? rng.uniform(0.0, 1.0) : 0.0;
  w(0, 1) = w(1, 0) = std::max(w(0, 1), 0.1);
  if (set.kind == ShiftSetKind::AdjacencySet) {
    if (set.scale == ScaleRule::FirstNodeDegreeOne) return w / w.col(0).sum();
    return w * (static_cast<double>(n) / w.sum());
  }
  Matrix l = laplacian_from_adjacency(w);
  return l * (static_cast<double>(n) / l.trace());
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("solver configuration is validated") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.tol = 0.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadParameter);
    c = SolverConfig{};
    c.step_scale = 1.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadParameter);
    c = SolverConfig{};
    c.max_iters = 0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("lasso coordinate descent matches sign-pattern enumeration") {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const Index k = 1 + static_cast<Index>(seed % 4);
      Matrix A = rng.normal_matrix(12, k);
      Vector b = rng.normal_matrix(12, 1).col(0);
      Matrix G = A.transpose() * A;
      Vector c = A.transpose() * b;
      double lambda = rng.uniform(0.0, 0.8) * c.cwiseAbs().maxCoeff();
      LassoResult r = lasso_cd_gram(G, c, lambda, Vector(), cfg);
      CHECK(r.trace.converged);
      CHECK((r.beta - lasso_brute_force(G, c, lambda)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(lasso_kkt_violation(G, c, lambda, Vector(), r.beta) < 1e-9);
    }
  }

  TEST_CASE("lasso edge cases") {
    Rng rng(1);
    Matrix A = rng.normal_matrix(20, 3);
    Vector b = rng.normal_matrix(20, 1).col(0);
    Vector c = A.transpose() * b;
    // lambda above |A'b|_inf gives zero
    CHECK(lasso_cd(A, b, 1.01 * c.cwiseAbs().maxCoeff()).beta.isZero(0.0));
    // lambda = 0 gives least squares
    SolverConfig cfg;
    cfg.tol = 1e-13;
    Vector ls = A.colPivHouseholderQr().solve(b);
    CHECK((lasso_cd(A, b, 0.0, cfg).beta - ls).norm() < 1e-9);
    // unpenalized coordinate
    Vector w(3);
    w << 0.0, 1.0, 1.0;
    LassoResult r = lasso_cd_gram(A.transpose() * A, c, 1e6, w, cfg);
    CHECK(r.beta(0) != 0.0);
    CHECK(r.beta(1) == 0.0);
    // objective reported with 0.5 |b|^2 included
    LassoResult full = lasso_cd(A, b, 0.5, cfg);
    double direct = 0.5 * (b - A * full.beta).squaredNorm() + 0.5 * full.beta.lpNorm<1>();
    CHECK(full.trace.objective.back() == doctest::Approx(direct).epsilon(1e-12));
    CHECK(code_of([&] { lasso_cd(A, b, -1.0); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("log-det proximal step satisfies its optimality condition") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(10 + seed);
      Matrix A = random_symmetric(5, rng);
      Matrix S = random_pd(5, rng);
      double rho = rng.uniform(0.1, 10.0);
      Matrix T = prox_neg_logdet(A, S, rho);
      CHECK(T.llt().info() == Eigen::Success);
      Matrix resid = -T.inverse() + S + rho * (T - A);
      CHECK(resid.norm() < 1e-9 * std::max(1.0, T.norm()));
    }
  }

  TEST_CASE("simplex projection matches a bisection on the threshold") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(30 + seed);
      Vector v = rng.normal_matrix(9, 1).col(0) * 2.0;
      double total = rng.uniform(0.5, 5.0);
      double lo = v.minCoeff() - total, hi = v.maxCoeff();
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        ((v.array() - mid).cwiseMax(0.0).sum() > total ? lo : hi) = mid;
      }
      Vector oracle = (v.array() - 0.5 * (lo + hi)).cwiseMax(0.0);
      CHECK((project_simplex(v, total) - oracle).norm() < 1e-10);
    }
    CHECK(code_of([] { project_simplex(Vector::Ones(3), 0.0); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("constraint-set projections satisfy the variational inequality") {
    const ShiftConstraintSet sets[] = {{ShiftSetKind::AdjacencySet, ScaleRule::FirstNodeDegreeOne},
                                       {ShiftSetKind::AdjacencySet, ScaleRule::TotalWeightN},
                                       {ShiftSetKind::LaplacianSet, ScaleRule::TotalWeightN}};
    for (const auto& set : sets) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(50 + seed);
        const Index n = 3 + static_cast<Index>(seed % 3);
        Matrix X = random_symmetric(n, rng);
        ProjectionResult p = dykstra_project_detail(X, set);
        CHECK(p.violation < 1e-8);
        CHECK(constraint_violation(p.S, set) < 1e-8);
        for (int t = 0; t < 40; ++t) {
          Matrix Y = random_feasible(n, set, rng);
          CHECK((X - p.S).cwiseProduct(Y - p.S).sum() < 1e-7);
        }
        // feasible points are fixed
        Matrix Y = random_feasible(n, set, rng);
        CHECK((dykstra_project(Y, set) - Y).norm() < 1e-7);
      }
    }
  }

  TEST_CASE("template projection is an orthogonal projection onto commuting matrices") {
    Rng rng(70);
    Matrix q = random_symmetric(6, rng);
    Matrix V = eigendecompose(q).vecs;
    Matrix M = random_symmetric(6, rng);
    Matrix P = project_onto_templates(M, V);
    Matrix D = V.transpose() * P * V;
    Matrix off = D;
    off.diagonal().setZero();
    CHECK(off.norm() < 1e-12);
    CHECK((project_onto_templates(P, V) - P).norm() < 1e-12);
    Matrix T = V * rng.normal_matrix(6, 1).col(0).asDiagonal() * V.transpose();
    CHECK(std::abs((M - P).cwiseProduct(T).sum()) < 1e-12);
    // partial templates: leading columns must stay eigenvectors
    Matrix Vk = V.leftCols(3);
    Matrix Pk = project_onto_templates(M, Vk);
    for (Index k = 0; k < 3; ++k) {
      Vector v = Vk.col(k);
      Vector pv = Pk * v;
      CHECK((pv - v.dot(pv) * v).norm() < 1e-12);
    }
  }

  TEST_CASE("spectral-template engine beats the generating shift and flags incompatible bases") {
    Matrix A = path_adjacency(5);
    A(0, 1) = A(1, 0) = 2.0;
    Matrix C = Matrix::Identity(5, 5) + 0.3 * A;
    SpectralBasis b = eigendecompose(C * C);
    ShiftConstraintSet set;
    SpectralSolveResult r = admm_l1_spectral(b.vecs, 0.0, set);
    Matrix truth = A / A.col(0).sum();
    CHECK(constraint_violation(r.S, set) < 1e-8);
    CHECK(r.template_distance < 1e-8);
    CHECK(r.objective <= sparsity_objective(truth, SparsityObjective::L1) + 1e-8);
    CHECK((project_onto_templates(r.S, b.vecs) - r.S).norm() < 1e-8);

    Rng rng(71);
    Matrix V = eigendecompose(random_symmetric(5, rng)).vecs;
    CHECK(code_of([&] { admm_l1_spectral(V, 0.0, set); }) == ErrorCode::Infeasible);
    SpectralSolveResult loose = admm_l1_spectral(V, 10.0, set);
    CHECK(constraint_violation(loose.S, set) < 1e-6);
    CHECK(loose.template_distance <= 10.0 + 1e-6);
  }

  TEST_CASE("log-barrier primal-dual agrees with a projected-gradient oracle") {
    SolverConfig cfg;
    cfg.tol = 1e-10;
    cfg.max_iters = 200000;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(80 + seed);
      Matrix X = rng.normal_matrix(4, 3);
      Matrix Z = Matrix::Zero(4, 4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) Z(i, j) = (X.row(i) - X.row(j)).squaredNorm();
      double alpha = 1.0, beta = 0.5;
      Matrix Wo;
      double fo = log_barrier_oracle(Z, alpha, beta, Wo);
      GraphSolveResult r = primal_dual_graph(Z, DegreeTerm::log_barrier(alpha), beta, cfg);
      CHECK(r.trace.converged);
      CHECK(graph_objective(r.W, Z, DegreeTerm::log_barrier(alpha), beta) <= fo + 1e-7);
      CHECK((r.W - Wo).cwiseAbs().maxCoeff() < 1e-4);
    }
  }

  TEST_CASE("total-weight constraint is held exactly") {
    Rng rng(90);
    Matrix X = rng.normal_matrix(6, 4);
    Matrix Z = Matrix::Zero(6, 6);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) Z(i, j) = (X.row(i) - X.row(j)).squaredNorm();
    PrimalDualOptions opts;
    opts.total_weight = 6.0;
    GraphSolveResult r = primal_dual_graph(Z, DegreeTerm::quadratic(1.0), 1.0, {}, opts);
    CHECK(r.W.sum() == doctest::Approx(6.0).epsilon(1e-10));
    CHECK((r.W.array() >= 0.0).all());
  }

  TEST_CASE("degree operator norm equals sqrt(2(n-1))") {
    for (Index n : {3, 5, 10, 30})
      CHECK(degree_operator_norm(n, 200, 1) == doctest::Approx(std::sqrt(2.0 * (n - 1))).epsilon(1e-8));
  }

  TEST_CASE("PSD helpers") {
    Rng rng(95);
    Matrix S = random_pd(5, rng);
    Matrix r = psd_sqrt(S);
    CHECK((r * r - S).norm() < 1e-12);
    Matrix ir = psd_inv_sqrt(S);
    CHECK((ir * S * ir - Matrix::Identity(5, 5)).norm() < 1e-10);
    Matrix sing = Matrix::Zero(3, 3);
    sing(0, 0) = 1.0;
    CHECK(code_of([&] { psd_inv_sqrt(sing); }) == ErrorCode::SingularInputCovariance);
    Matrix M = random_symmetric(5, rng);
    Matrix P = project_psd(M);
    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // the residual is negative semidefinite and orthogonal to P
    Eigen::SelfAdjointEigenSolver<Matrix> er(M - P);
    CHECK(er.eigenvalues().maxCoeff() < 1e-12);
    CHECK(std::abs((M - P).cwiseProduct(P).sum()) < 1e-10);
  }
}
