#include <cmath>

#include "glk/smoothlearn.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

TEST_SUITE("smoothlearn") {
  TEST_CASE("distance matrix and the trace identity") {
    Rng rng(1);
    Matrix x = rng.normal_matrix(5, 7);
    Matrix z = distance_matrix(SignalSet(x));
    CHECK(z(1, 3) == doctest::Approx((x.row(1) - x.row(3)).squaredNorm()));
    CHECK(z.diagonal().isZero(0.0));
    Matrix w = gen_er_graph(5, 0.7, WeightDist{}, rng).matrix();
    double lhs = (x.transpose() * laplacian_from_adjacency(w) * x).trace();
    CHECK(lhs == doctest::Approx(0.5 * w.cwiseProduct(z).sum()).epsilon(1e-12));
  }

  TEST_CASE("alternating factor-analysis learner") {
    Rng rng(2);
    ShiftOperator l(laplacian_from_adjacency(gen_er_graph(8, 0.4, WeightDist{}, rng, true).matrix()),
                    ShiftKind::Laplacian);
    SignalSet x = gen_smooth(l, 40, 0.05, rng);
    DongResult r = dong_learn(x, 0.5, 0.5);
    CHECK(r.laplacian.trace() == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(r.laplacian.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    Matrix off = r.laplacian;
    off.diagonal().setZero();
    CHECK(off.maxCoeff() <= 0.0);
    for (size_t k = 1; k < r.trace.objective.size(); ++k)
      CHECK(r.trace.objective[k] <= r.trace.objective[k - 1] * (1.0 + 1e-6) + 1e-9);
    CHECK(r.trace.objective.back() ==
          doctest::Approx(dong_objective(x.data(), r.Y, r.laplacian, 0.5, 0.5)).epsilon(1e-12));
    CHECK(code_of([&] { dong_learn(x, 0.0, 1.0); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("Gaussian-entropy prior zeroes the entrywise derivative") {
    Rng rng(3);
    Matrix z = distance_matrix(SignalSet(rng.normal_matrix(5, 3)));
    const double sigma = 1.3;
    GraphSolveResult r = general_smooth_learn(z, SmoothPrior::gaussian_entropy(sigma));
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j)
        if (i != j) CHECK(z(i, j) + sigma * sigma * std::log(r.W(i, j)) == doctest::Approx(0.0).scale(1.0));
    CHECK(r.W.diagonal().isZero(0.0));
    CHECK(code_of([&] { general_smooth_learn(z, SmoothPrior::gaussian_entropy(0.0)); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("log-barrier learner keeps every degree positive") {
    Rng rng(4);
    Matrix z = distance_matrix(SignalSet(rng.normal_matrix(7, 5)));
    GraphSolveResult r = kalofolias_learn(z, 1.0, 0.5);
    CHECK(r.trace.converged);
    CHECK(r.W.rowwise().sum().minCoeff() > 0.0);
    CHECK(r.kkt_residual < 1e-5);
  }

  TEST_CASE("edge selection picks the closest pairs with lexicographic ties") {
    Matrix x{{0.0}, {1.0}, {2.0}, {10.0}};
    EdgeSelection e = edge_select(SignalSet(x.replicate(1, 2)), 2);
    REQUIRE(e.edges.size() == 2);
    CHECK(e.edges[0] == std::make_pair(Index{0}, Index{1}));
    CHECK(e.edges[1] == std::make_pair(Index{1}, Index{2}));
    CHECK(e.laplacian.trace() == 4.0);
    CHECK(code_of([&] { edge_select(SignalSet(x.replicate(1, 2)), 7); }) == ErrorCode::BadK);
    CHECK(code_of([&] { edge_select(SignalSet(x.replicate(1, 2)), 0); }) == ErrorCode::BadK);
  }

  TEST_CASE("noisy edge selection reaches a fixed point") {
    Rng rng(5);
    ShiftOperator l(laplacian_from_adjacency(path_adjacency(6)), ShiftKind::Laplacian);
    SignalSet x = gen_smooth(l, 30, 0.01, rng);
    NoisyEdgeSelection r = edge_select_noisy(x, 5, 1.0);
    CHECK(r.trace.converged);
    EdgeSelection again = edge_select(SignalSet(r.Y), 5);
    auto a = again.edges, b = r.selection.edges;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}
