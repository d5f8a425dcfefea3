#include <cmath>

#include "glk/simulate.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

TEST_SUITE("simulate") {
  TEST_CASE("equal seeds give identical draws") {
    Rng a(42), b(42), c(43);
    Matrix ma = a.normal_matrix(4, 5);
    CHECK(ma == b.normal_matrix(4, 5));
    CHECK(ma != c.normal_matrix(4, 5));
    Rng g1(7), g2(7);
    CHECK(gen_er_graph(12, 0.3, WeightDist{}, g1).matrix() == gen_er_graph(12, 0.3, WeightDist{}, g2).matrix());
    CHECK(code_of([] { Rng r(RngSpec{1, "pcg"}); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("Erdos-Renyi draws respect weights and connectivity") {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
      Matrix w = gen_er_graph(10, 0.3, WeightDist{0.5, 1.5}, rng, true).matrix();
      CHECK(connected_components(w) == 1);
      for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 10; ++j)
          if (w(i, j) != 0.0) {
            CHECK(w(i, j) >= 0.5);
            CHECK(w(i, j) <= 1.5);
          }
    }
    CHECK(gen_er_graph(5, 1.0, WeightDist{1.0, 1.0}, rng).matrix().sum() == 20.0);
    CHECK(code_of([&] { gen_er_graph(5, 0.0, WeightDist{}, rng, true); }) == ErrorCode::CannotConnect);
    CHECK(code_of([&] { gen_er_graph(5, 1.5, WeightDist{}, rng); }) == ErrorCode::BadParameter);
  }

  TEST_CASE("Gaussian samples live in the range of a singular covariance") {
    Rng rng(2);
    Matrix b = rng.normal_matrix(5, 2);
    Matrix cov = b * b.transpose();
    Matrix x = sample_gaussian(cov, 50, rng);
    Matrix proj = b * (b.transpose() * b).inverse() * b.transpose();
    CHECK((x - proj * x).norm() < 1e-10 * x.norm());
  }

  TEST_CASE("sample covariance of a GMRF approaches the inverse precision") {
    Rng rng(3);
    Matrix theta = laplacian_from_adjacency(path_adjacency(4)) + Matrix::Identity(4, 4);
    Matrix x = sample_gmrf(theta, 200000, rng).data();
    Matrix s = x * x.transpose() / 200000.0;
    CHECK((s - theta.inverse()).cwiseAbs().maxCoeff() < 0.02);
    Matrix bad = -Matrix::Identity(3, 3);
    CHECK(code_of([&] { sample_gmrf(bad, 10, rng); }) == ErrorCode::NotPositiveDefinite);
  }

  TEST_CASE("diffusion covariance is H H' for white input") {
    Rng rng(4);
    Matrix s = gen_er_graph(6, 0.5, WeightDist{}, rng).matrix();
    FilterSpec h{1.0, 0.5, 0.2};
    Matrix H = filter_matrix(s, h);
    CHECK((diffusion_covariance(s, h) - H * H.transpose()).norm() < 1e-12);
    Matrix sw = random_pd(6, rng);
    CHECK((diffusion_covariance(s, h, sw) - H * sw * H.transpose()).norm() < 1e-12);
  }

  TEST_CASE("noiseless smooth signals are orthogonal to constants") {
    Rng rng(5);
    ShiftOperator l(laplacian_from_adjacency(gen_er_graph(8, 0.5, WeightDist{}, rng, true).matrix()),
                    ShiftKind::Laplacian);
    Matrix x = gen_smooth(l, 30, 0.0, rng).data();
    CHECK(x.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    std::vector<std::string> warnings;
    ShiftOperator split(laplacian_from_adjacency(Matrix::Zero(3, 3)), ShiftKind::Laplacian);
    gen_smooth(split, 5, 0.1, rng, &warnings);
    CHECK_FALSE(warnings.empty());
  }

  TEST_CASE("noiseless SEM solves the structural equations exactly") {
    Rng rng(6);
    Matrix w = gen_er_graph(6, 0.4, WeightDist{0.1, 0.3}, rng).matrix();
    w(0, 1) = 0.2;  // directed
    ShiftOperator W(w, ShiftKind::Generic, true);
    Vector omega = Vector::LinSpaced(6, 0.5, 1.5);
    Matrix u = rng.normal_matrix(6, 20);
    Matrix x = gen_sem(W, omega, u, 0.0, rng).data();
    CHECK((x - w * x - omega.asDiagonal() * u).norm() < 1e-12);
    ShiftOperator big(2.0 * Matrix::Ones(3, 3), ShiftKind::Generic, true);
    CHECK(code_of([&] { gen_sem(big, Vector::Ones(3), Matrix::Ones(3, 2), 0.0, rng); }) == ErrorCode::UnstableSEM);
  }

  TEST_CASE("spectral radius of a rotation is one") {
    Matrix r{{0.0, -1.0}, {1.0, 0.0}};
    CHECK(spectral_radius(r) == doctest::Approx(1.0));
  }

  TEST_CASE("SVAR series have the requested shape and noise level") {
    Rng rng(7);
    std::vector<Matrix> lags{Matrix::Zero(3, 3), Matrix::Zero(3, 3)};
    Matrix x = gen_svar(lags, 50000, 0.25, rng);
    CHECK(x.rows() == 3);
    CHECK(x.cols() == 50000);
    CHECK(x.squaredNorm() / 150000.0 == doctest::Approx(0.25).epsilon(0.02));
    CHECK(code_of([&] { gen_svar({}, 10, 1.0, rng); }) == ErrorCode::BadParameter);
  }
}
