#include <algorithm>
#include <cmath>

#include "glk/statnet.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

namespace {

// Rejects every p-value at or below the largest p-value t with
// #{p <= t} * q / m >= t.
std::vector<bool> bh_by_definition(const std::vector<double>& p, double q) {
  const double m = static_cast<double>(p.size());
  double cut = -1.0;
  for (double t : p) {
    double r = static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= t; }));
    if (t <= r * q / m) cut = std::max(cut, t);
  }
  std::vector<bool> out;
  for (double v : p) out.push_back(v <= cut);
  return out;
}

}  // namespace

TEST_SUITE("statnet") {
  TEST_CASE("Benjamini-Hochberg matches its definition") {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> p;
      for (int k = 0; k < 15; ++k) {
        double v = rng.uniform(0.0, 1.0);
        p.push_back(rng.bernoulli(0.4) ? v * 0.01 : v);
      }
      if (t % 10 == 0) p[3] = p[7];  // ties
      double q = rng.uniform(0.01, 0.3);
      CHECK(benjamini_hochberg(p, q) == bh_by_definition(p, q));
    }
    CHECK(code_of([] { benjamini_hochberg({0.1}, 0.0); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("Fisher p-values at known quantiles") {
    const double v = 1.0 / 47.0;
    CHECK(fisher_p_value(std::tanh(1.959963984540054 * std::sqrt(v)), v) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(fisher_p_value(-std::tanh(2.5758293035489 * std::sqrt(v)), v) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(fisher_p_value(0.0, v) == 1.0);
    CHECK(fisher_p_value(1.0, v) == 0.0);
  }

  TEST_CASE("partial correlations equal correlations of regression residuals") {
    Rng rng(2);
    Matrix b = rng.normal_matrix(5, 5);
    Matrix x = b * rng.normal_matrix(5, 40);
    SignalSet X(x);
    Matrix s = sample_covariance(X);
    Matrix rho = partial_correlations(s.inverse());
    Matrix xc = x.colwise() - x.rowwise().mean();
    for (Index i = 0; i < 5; ++i)
      for (Index j = i + 1; j < 5; ++j) {
        Matrix others(3, 40);
        Index r = 0;
        for (Index k = 0; k < 5; ++k)
          if (k != i && k != j) others.row(r++) = xc.row(k);
        auto resid = [&](Index v) {
          Vector y = xc.row(v).transpose();
          Vector coef = others.transpose().colPivHouseholderQr().solve(y);
          return Vector(y - others.transpose() * coef);
        };
        Vector ri = resid(i), rj = resid(j);
        CHECK(rho(i, j) == doctest::Approx(ri.dot(rj) / (ri.norm() * rj.norm())).epsilon(1e-9));
      }
  }

  TEST_CASE("test tables cover every pair once") {
    Rng rng(3);
    SignalSet X(rng.normal_matrix(6, 30));
    NetworkTest t = correlation_network(X, 0.1);
    CHECK(t.table.pairs.size() == 15);
    CHECK(t.table.pairs[0].i == 0);
    CHECK(t.table.pairs[0].j == 1);
    CHECK(code_of([&] { partial_correlation_network(SignalSet(rng.normal_matrix(6, 7)), 0.1); }) ==
          ErrorCode::TooFewSamples);
    CHECK_NOTHROW(partial_correlation_network(SignalSet(rng.normal_matrix(6, 7)), 0.1, true));
    CHECK(code_of([&] { correlation_network(SignalSet(rng.normal_matrix(6, 3)), 0.1); }) ==
          ErrorCode::TooFewSamples);
  }

  TEST_CASE("graphical lasso satisfies its subgradient conditions") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      Rng rng(10 + seed);
      Matrix s = sample_covariance(SignalSet(rng.normal_matrix(6, 30)));
      double lambda = 0.05 + 0.05 * static_cast<double>(seed);
      bool pen_diag = seed % 2 == 1;
      SolverConfig cfg;
      cfg.tol = 1e-10;
      GlassoResult r = graphical_lasso(s, lambda, pen_diag, cfg);
      Matrix grad = s - r.theta.inverse();
      double worst = 0.0;
      for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j) {
          double lam = (i == j && !pen_diag) ? 0.0 : lambda;
          double th = r.theta(i, j);
          double v = th != 0.0 ? std::abs(grad(i, j) + lam * (th > 0.0 ? 1.0 : -1.0))
                               : std::max(0.0, std::abs(grad(i, j)) - lam);
          worst = std::max(worst, v);
        }
      CHECK(worst < 1e-6);
    }
  }

  TEST_CASE("graphical lasso at lambda zero inverts the covariance") {
    Rng rng(20);
    Matrix s = random_pd(5, rng);
    SolverConfig cfg;
    cfg.tol = 1e-12;
    GlassoResult r = graphical_lasso(s, 0.0, false, cfg);
    CHECK((r.theta - s.inverse()).norm() < 1e-4 * s.inverse().norm());
  }

  TEST_CASE("Laplacian GMRF is optimal against random feasible points") {
    Rng rng(30);
    Matrix x = rng.normal_matrix(3, 20);
    Matrix s = sample_covariance(SignalSet(x));
    const double lambda = 0.05;
    SolverConfig cfg;
    cfg.tol = 1e-10;
    LaplacianGmrfResult r = laplacian_gmrf(s, lambda, cfg);
    double best = laplacian_gmrf_objective(r.laplacian, r.gamma, s, lambda);
    CHECK(best == doctest::Approx(r.objective).epsilon(1e-10));
    Matrix w = adjacency_from_laplacian(r.laplacian);
    for (int t = 0; t < 3000; ++t) {
      double scale = t < 1500 ? 0.05 : 1.0;
      Matrix wt = w;
      for (Index i = 0; i < 3; ++i)
        for (Index j = i + 1; j < 3; ++j) wt(i, j) = wt(j, i) = std::max(0.0, w(i, j) + scale * rng.normal());
      double g = std::max(1e-6, r.gamma + scale * rng.normal());
      CHECK(laplacian_gmrf_objective(laplacian_from_adjacency(wt), g, s, lambda) >= best - 1e-9);
    }
  }

  TEST_CASE("neighborhood regressions match a direct lasso on standardized rows") {
    Rng rng(40);
    Matrix x = rng.normal_matrix(5, 60);
    x.row(1) += 0.8 * x.row(0);
    double lambda = 8.0;
    SolverConfig cfg;
    cfg.tol = 1e-12;
    NeighborhoodResult r = neighborhood_lasso(SignalSet(x), lambda, CombineRule::Or, cfg);
    Matrix d = x.colwise() - x.rowwise().mean();
    for (Index i = 0; i < 5; ++i) d.row(i) /= std::sqrt(d.row(i).squaredNorm() / 60.0);
    Matrix a(60, 4);
    Index c = 0;
    for (Index k = 1; k < 5; ++k) a.col(c++) = d.row(k).transpose();
    LassoResult direct = lasso_cd(a, d.row(0).transpose(), lambda, cfg);
    for (Index k = 1; k < 5; ++k) CHECK(r.coefficients(0, k) == doctest::Approx(direct.beta(k - 1)).epsilon(1e-9));
    CHECK(r.graph.matrix()(0, 1) == 1.0);

    NeighborhoodResult a_rule = neighborhood_lasso(SignalSet(x), lambda, CombineRule::And, cfg);
    CHECK((a_rule.graph.matrix().array() <= r.graph.matrix().array()).all());
    NeighborhoodResult empty = neighborhood_lasso(SignalSet(x), 1e6, CombineRule::Or, cfg);
    CHECK(empty.graph.matrix().isZero(0.0));
  }

  TEST_CASE("automatic penalties") {
    CHECK(glasso_auto_lambda(10, 100) == doctest::Approx(2.0 * std::sqrt(std::log(10.0) / 100.0)));
    CHECK(neighborhood_auto_lambda(10, 100) == doctest::Approx(2.0 * std::sqrt(100.0 * std::log(10.0))));
  }
}
