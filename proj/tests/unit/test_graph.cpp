#include <cmath>

#include "glk/graph.hpp"
#include "helpers.hpp"

using namespace glk;
using namespace glk::test;

TEST_SUITE("graph") {
  TEST_CASE("shift construction validates its kind") {
    Matrix a = path_adjacency(4);
    CHECK_NOTHROW(ShiftOperator(a, ShiftKind::Adjacency));
    Matrix neg = a;
    neg(0, 1) = neg(1, 0) = -1.0;
    CHECK(code_of([&] { ShiftOperator(neg, ShiftKind::Adjacency); }) == ErrorCode::InvalidWeight);
    Matrix asym = a;
    asym(0, 1) = 2.0;
    CHECK(code_of([&] { ShiftOperator(asym, ShiftKind::Adjacency); }) == ErrorCode::NotSymmetric);
    CHECK_NOTHROW(ShiftOperator(asym, ShiftKind::Adjacency, true));
    Matrix l = laplacian_from_adjacency(a);
    CHECK_NOTHROW(ShiftOperator(l, ShiftKind::Laplacian));
    l(0, 0) += 1.0;
    CHECK(code_of([&] { ShiftOperator(l, ShiftKind::Laplacian); }) == ErrorCode::InvalidWeight);
    CHECK(code_of([&] { ShiftOperator(Matrix::Zero(2, 3), ShiftKind::Generic); }) == ErrorCode::BadDimension);
  }

  TEST_CASE("edge lists round trip through build_shift") {
    Rng rng(3);
    ShiftOperator g = gen_er_graph(7, 0.5, WeightDist{}, rng);
    auto edges = g.edges();
    ShiftOperator back = build_shift(edges, 7, ShiftKind::Adjacency);
    CHECK((back.matrix() - g.matrix()).norm() == 0.0);

    ShiftOperator lap = build_shift(edges, 7, ShiftKind::Laplacian);
    CHECK((lap.matrix() - laplacian_from_adjacency(g.matrix())).norm() == doctest::Approx(0.0));
    auto ledges = lap.edges();
    REQUIRE(ledges.size() == edges.size());
    for (size_t k = 0; k < edges.size(); ++k) CHECK(ledges[k].w == doctest::Approx(edges[k].w));

    std::vector<Edge> bad{{0, 9, 1.0}};
    CHECK(code_of([&] { build_shift(bad, 7, ShiftKind::Adjacency); }) == ErrorCode::BadIndex);
    std::vector<Edge> loop{{2, 2, 1.0}};
    CHECK(code_of([&] { build_shift(loop, 7, ShiftKind::Adjacency); }) == ErrorCode::InvalidWeight);
  }

  TEST_CASE("Laplacian and adjacency conversions are inverse") {
    Rng rng(4);
    Matrix w = gen_er_graph(6, 0.6, WeightDist{}, rng).matrix();
    Matrix l = laplacian_from_adjacency(w);
    CHECK((adjacency_from_laplacian(l) - w).norm() == 0.0);
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("connected components of a disjoint union") {
    Matrix a = Matrix::Zero(6, 6);
    a(0, 1) = a(1, 0) = 1.0;
    a(2, 3) = a(3, 2) = 1.0;
    CHECK(connected_components(a) == 4);
    CHECK(connected_components(path_adjacency(6)) == 1);
  }

  TEST_CASE("eigendecomposition is orthonormal, ascending and sign-normalized") {
    Rng rng(5);
    Matrix s = random_symmetric(8, rng);
    SpectralBasis b = eigendecompose(s);
    CHECK((b.vecs.transpose() * b.vecs - Matrix::Identity(8, 8)).norm() < 1e-12);
    CHECK((b.vecs * b.vals.asDiagonal() * b.vecs.transpose() - s).norm() < 1e-12);
    for (Index k = 0; k + 1 < 8; ++k) CHECK(b.vals(k) <= b.vals(k + 1));
    for (Index k = 0; k < 8; ++k) {
      Index peak;
      b.vecs.col(k).cwiseAbs().maxCoeff(&peak);
      CHECK(b.vecs(peak, k) > 0.0);
    }
    CHECK_FALSE(b.degenerate());
  }

  TEST_CASE("repeated eigenvalues are reported as blocks") {
    // complete graph K4: eigenvalue -1 with multiplicity 3
    Matrix k4 = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
    SpectralBasis b = eigendecompose(k4);
    REQUIRE(b.degenerate_blocks.size() == 1);
    CHECK(b.degenerate_blocks[0].first == 0);
    CHECK(b.degenerate_blocks[0].second == 3);
    auto amb = b.ambiguous_modes();
    CHECK(amb[0]);
    CHECK_FALSE(amb[3]);
  }

  TEST_CASE("eigendecompose rejects nonsymmetric input") {
    Matrix m{{0.0, 1.0}, {0.0, 0.0}};
    CHECK(code_of([&] { eigendecompose(m); }) == ErrorCode::NotSymmetric);
  }

  TEST_CASE("GFT of a Laplacian eigenvector is a unit impulse") {
    ShiftOperator l(laplacian_from_adjacency(path_adjacency(5)), ShiftKind::Laplacian);
    SpectralBasis b = eigendecompose(l);
    Vector xt = gft(b.vecs.col(2), b);
    Vector e = Vector::Zero(5);
    e(2) = 1.0;
    CHECK((xt - e).norm() < 1e-12);
    CHECK(b.vals(0) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("total variation of a constant signal is zero and matches the edge sum") {
    Rng rng(6);
    Matrix w = gen_er_graph(6, 0.5, WeightDist{}, rng).matrix();
    ShiftOperator l(laplacian_from_adjacency(w), ShiftKind::Laplacian);
    CHECK(total_variation(Vector::Ones(6), l) == doctest::Approx(0.0));
    Vector x = rng.normal_matrix(6, 1).col(0);
    double direct = 0.0;
    for (Index i = 0; i < 6; ++i)
      for (Index j = i + 1; j < 6; ++j) direct += w(i, j) * (x(i) - x(j)) * (x(i) - x(j));
    CHECK(total_variation(x, l) == doctest::Approx(direct).epsilon(1e-12));
    ShiftOperator a(w, ShiftKind::Adjacency);
    CHECK(code_of([&] { total_variation(x, a); }) == ErrorCode::WrongKind);
  }

  TEST_CASE("filters: Horner evaluation matches the power sum") {
    Rng rng(7);
    Matrix s = gen_er_graph(6, 0.5, WeightDist{}, rng).matrix();
    FilterSpec h{0.3, -1.0, 0.25, 0.1};
    Matrix direct = Matrix::Zero(6, 6);
    Matrix power = Matrix::Identity(6, 6);
    for (Index l = 0; l < h.taps(); ++l) {
      direct += h.coeffs(l) * power;
      power = power * s;
    }
    CHECK((filter_matrix(s, h) - direct).norm() < 1e-12);
    Vector x = rng.normal_matrix(6, 1).col(0);
    CHECK((apply_filter(ShiftOperator(s, ShiftKind::Adjacency), h, x) - direct * x).norm() < 1e-12);
  }

  TEST_CASE("frequency response equals the diagonal of V' H V") {
    Rng rng(8);
    Matrix s = gen_er_graph(7, 0.4, WeightDist{}, rng).matrix();
    SpectralBasis b = eigendecompose(s);
    FilterSpec h{1.0, 0.5, 0.2};
    Matrix hv = b.vecs.transpose() * filter_matrix(s, h) * b.vecs;
    CHECK((filter_freq_response(h, b) - hv.diagonal()).norm() < 1e-12);
  }

  TEST_CASE("stationarity score separates filtered white noise from arbitrary covariances") {
    Rng rng(9);
    Matrix s = gen_er_graph(8, 0.4, WeightDist{}, rng).matrix();
    SpectralBasis b = eigendecompose(s);
    Matrix h = filter_matrix(s, FilterSpec{1.0, 0.4});
    CHECK(stationarity_score(h * h, b) < 1e-12);
    CHECK(stationarity_score(random_pd(8, rng), b) > 1e-3);
    PsdEstimate psd = graph_psd(h * h, b);
    CHECK(psd.stationary);
    CHECK((psd.psd - filter_freq_response(FilterSpec{1.0, 0.4}, b).cwiseAbs2()).norm() < 1e-12);
  }

  TEST_CASE("band-limited reconstruction by magnitude and by frequency") {
    ShiftOperator l(laplacian_from_adjacency(path_adjacency(6)), ShiftKind::Laplacian);
    SpectralBasis b = eigendecompose(l);
    Vector coeffs = Vector::Zero(6);
    coeffs(0) = 0.1;
    coeffs(5) = 3.0;
    Vector x = igft(coeffs, b);
    Reconstruction mag = bandlimit_reconstruct(x, b, 1, CoefficientOrder::Magnitude);
    CHECK(mag.kept == std::vector<Index>{5});
    Reconstruction freq = bandlimit_reconstruct(x, b, 1, CoefficientOrder::Frequency);
    CHECK(freq.kept == std::vector<Index>{0});
    CHECK(mag.rel_err < freq.rel_err);
    CHECK(bandlimit_reconstruct(x, b, 2).rel_err < 1e-14);
    CHECK(code_of([&] { bandlimit_reconstruct(x, b, 0); }) == ErrorCode::BadK);
  }

  TEST_CASE("signal sets reject degenerate shapes") {
    CHECK(code_of([] { SignalSet(Matrix::Zero(1, 3)); }) == ErrorCode::BadDimension);
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::nan("");
    CHECK(code_of([&] { SignalSet{nan}; }) == ErrorCode::BadInput);
  }
}
