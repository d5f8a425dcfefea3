#include <cmath>

#include "glk/netdyn.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

namespace {

CascadeData two_node_cascade(Index t, double noise, Rng& rng) {
  Matrix w{{0.0, 0.5}, {-0.3, 0.0}};
  Vector omega(2);
  omega << 1.0, 2.0;
  Matrix u = rng.normal_matrix(2, t);
  Matrix x = gen_sem(ShiftOperator(w, ShiftKind::Generic, true), omega, u, noise, rng).data();
  return CascadeData(x, u);
}

}  // namespace

TEST_SUITE("netdyn") {
  TEST_CASE("cascade data validates shapes") {
    CHECK(code_of([] { CascadeData(Matrix::Zero(3, 4), Matrix::Zero(3, 5)); }) == ErrorCode::BadDimension);
    CHECK(code_of([] { CascadeData(std::vector<Matrix>{}, std::vector<Matrix>{}); }) == ErrorCode::BadInput);
  }

  TEST_CASE("noiseless two-node SEM is recovered") {
    Rng rng(1);
    CascadeData d = two_node_cascade(200, 0.0, rng);
    SolverConfig cfg;
    cfg.tol = 1e-12;
    SemFit f = sem_fit(d, 1e-8, cfg);
    CHECK(f.W.matrix()(0, 1) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(f.W.matrix()(1, 0) == doctest::Approx(-0.3).epsilon(1e-4));
    CHECK(f.omega(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(f.omega(1) == doctest::Approx(2.0).epsilon(1e-4));
  }

  TEST_CASE("a large penalty leaves only the input regression") {
    Rng rng(2);
    CascadeData d = two_node_cascade(100, 0.1, rng);
    SemFit f = sem_fit(d, 1e9);
    CHECK(f.W.matrix().isZero(0.0));
    for (Index i = 0; i < 2; ++i) {
      double ls = d.X[0].row(i).dot(d.U[0].row(i)) / d.U[0].row(i).squaredNorm();
      CHECK(f.omega(i) == doctest::Approx(ls).epsilon(1e-9));
    }
  }

  TEST_CASE("recursive Gram matches the direct weighted sum") {
    Rng rng(3);
    std::vector<Matrix> xs{rng.normal_matrix(3, 30), rng.normal_matrix(3, 30)};
    std::vector<Matrix> us{rng.normal_matrix(3, 30), rng.normal_matrix(3, 30)};
    CascadeData d(xs, us);
    Matrix g = Matrix::Zero(6, 6);
    for (Index t = 0; t < 30; ++t) {
      update_gram(g, d, t, 0.9);
      CHECK((g - weighted_gram(d, 0.9, t + 1)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("tracking with unit forgetting ends at the batch fit") {
    Rng rng(4);
    CascadeData d = two_node_cascade(60, 0.05, rng);
    SolverConfig cfg;
    cfg.tol = 1e-12;
    GraphTrajectory tr = dynamic_sem_track(d, 1.0, 2.0, cfg, 25);
    CHECK(tr.times == std::vector<Index>{24, 49, 59});
    CHECK(tr.edge_counts.size() == 60);
    SemFit batch = sem_fit(d, 2.0, cfg);
    CHECK((tr.W.back() - batch.W.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(code_of([&] { dynamic_sem_track(d, 0.0, 1.0); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("SVAR: a single strong lag is found and white noise gives no edges") {
    Rng rng(5);
    std::vector<Matrix> lags{Matrix::Zero(4, 4)};
    lags[0](0, 1) = 0.8;
    Matrix x = gen_svar(lags, 5000, 1.0, rng);
    double lam = svarm_auto_lambda(4, 1, 5000);
    SvarmFit f = svarm_fit(x, 1, lam, CombineRule::Or);
    CHECK(f.graph.matrix()(0, 1) == 1.0);
    CHECK(f.lags[0](0, 1) == doctest::Approx(0.8).epsilon(0.1));
    Matrix off = f.graph.matrix();
    CHECK(off.sum() <= 2.0);

    std::vector<Matrix> lags2{Matrix::Zero(4, 4), Matrix::Zero(4, 4)};
    lags2[0](0, 1) = 0.5;
    lags2[1](2, 3) = 0.5;
    Matrix y = gen_svar(lags2, 3000, 1.0, rng);
    double lam2 = svarm_auto_lambda(4, 2, 3000);
    SvarmFit o = svarm_fit(y, 2, lam2, CombineRule::Or);
    SvarmFit a = svarm_fit(y, 2, lam2, CombineRule::And);
    CHECK((a.graph.matrix().array() <= o.graph.matrix().array()).all());

    Matrix white = rng.normal_matrix(5, 2000);
    SvarmFit w = svarm_fit(white, 1, svarm_auto_lambda(5, 1, 2000), CombineRule::Or);
    CHECK(w.graph.matrix().sum() <= 1.0);
  }

  TEST_CASE("SVAR input checks") {
    Rng rng(6);
    CHECK(code_of([&] { svarm_fit(rng.normal_matrix(3, 3), 2, 1.0, CombineRule::Or); }) == ErrorCode::TooFewSamples);
    Matrix c = rng.normal_matrix(3, 50);
    c.row(1).setConstant(2.0);
    CHECK(code_of([&] { svarm_fit(c, 1, 1.0, CombineRule::Or); }) == ErrorCode::BadInput);
  }
}
