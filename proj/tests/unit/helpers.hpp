#pragma once

#include <doctest.h>

#include "glk/graph.hpp"
#include "glk/simulate.hpp"

namespace glk::test {

inline Matrix random_symmetric(Index n, Rng& rng) {
  Matrix g = rng.normal_matrix(n, n);
  return 0.5 * (g + g.transpose());
}

inline Matrix random_pd(Index n, Rng& rng, double floor = 0.2) {
  Matrix g = rng.normal_matrix(n, n);
  return g * g.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n);
}

inline Matrix path_adjacency(Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
  return a;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::BadInput;
}

}  // namespace glk::test
