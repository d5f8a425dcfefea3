#include "glk/simulate.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace glk {

Rng::Rng(const RngSpec& spec) : engine_(spec.seed) {
  require(spec.generator == "mt19937_64", ErrorCode::BadParameter, "unsupported generator '" + spec.generator + "'");
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
  Matrix z(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) z(r, c) = normal();
  return z;
}

ShiftOperator gen_er_graph(Index n, double p_edge, const WeightDist& weights, Rng& rng, bool require_connected) {
  require(n >= 1, ErrorCode::BadDimension, "vertex count must be positive");
  require(p_edge >= 0.0 && p_edge <= 1.0, ErrorCode::BadParameter, "edge probability must lie in [0, 1]");
  require(weights.lo >= 0.0 && weights.hi >= weights.lo, ErrorCode::BadParameter, "invalid weight range");
  constexpr int kMaxTries = 1000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    Matrix W = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.bernoulli(p_edge)) {
          double w = weights.lo == weights.hi ? weights.lo : rng.uniform(weights.lo, weights.hi);
          W(i, j) = W(j, i) = w;
        }
    if (!require_connected || connected_components(W) == 1) return ShiftOperator(std::move(W), ShiftKind::Adjacency);
  }
  fail(ErrorCode::CannotConnect, "no connected graph after 1000 draws");
}

Matrix sample_gaussian(const Matrix& cov, Index p, Rng& rng) {
  require(cov.rows() == cov.cols(), ErrorCode::BadDimension, "covariance must be square");
  require(p >= 1, ErrorCode::BadParameter, "sample count must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  Vector vals = es.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  Vector root = (vals.array() <= floor).select(0.0, vals.cwiseMax(0.0)).cwiseSqrt();
  Matrix factor = es.eigenvectors() * root.asDiagonal();
  return factor * rng.normal_matrix(cov.rows(), p);
}

SignalSet sample_gmrf(const Matrix& precision, Index p, Rng& rng) {
  require(precision.rows() == precision.cols(), ErrorCode::BadDimension, "precision must be square");
  require(is_symmetric(precision, kSymmetryTol * std::max(1.0, precision.cwiseAbs().maxCoeff())),
          ErrorCode::NotSymmetric, "precision must be symmetric");
  require(p >= 1, ErrorCode::BadParameter, "sample count must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> es(precision);
  const Vector& lam = es.eigenvalues();
  if (lam.minCoeff() <= 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff()))
    fail(ErrorCode::NotPositiveDefinite, "precision matrix is not positive definite");
  Matrix factor = es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
  return SignalSet(factor * rng.normal_matrix(precision.rows(), p));
}

Matrix diffusion_covariance(const Matrix& S, const FilterSpec& h, const std::optional<Matrix>& input_cov) {
  Matrix H = filter_matrix(S, h);
  if (!input_cov) return H * H.transpose();
  require(input_cov->rows() == S.rows() && input_cov->cols() == S.cols(), ErrorCode::BadDimension,
          "input covariance dimension mismatch");
  return H * *input_cov * H.transpose();
}

SignalSet gen_diffusion(const ShiftOperator& S, const FilterSpec& h, Index p, const std::optional<Matrix>& input_cov,
                        Rng& rng) {
  const Index n = S.n();
  Matrix w;
  if (input_cov) {
    require(input_cov->rows() == n && input_cov->cols() == n, ErrorCode::BadDimension,
            "input covariance dimension mismatch");
    w = sample_gaussian(*input_cov, p, rng);
  } else {
    require(p >= 1, ErrorCode::BadParameter, "sample count must be positive");
    w = rng.normal_matrix(n, p);
  }
  return SignalSet(apply_filter(S.matrix(), h, w));
}

SignalSet gen_smooth(const ShiftOperator& laplacian, Index p, double noise_var, Rng& rng,
                     std::vector<std::string>* warnings) {
  require(laplacian.kind() == ShiftKind::Laplacian, ErrorCode::WrongKind, "smooth signals need a Laplacian");
  require(noise_var >= 0.0, ErrorCode::BadParameter, "noise variance must be >= 0");
  require(p >= 1, ErrorCode::BadParameter, "sample count must be positive");
  const Index n = laplacian.n();
  SpectralBasis basis = eigendecompose(laplacian);
  const double tol = 1e-9 * std::max(1.0, basis.vals.cwiseAbs().maxCoeff());
  Vector sd(n);
  Index zero_modes = 0;
  for (Index k = 0; k < n; ++k) {
    if (basis.vals(k) > tol) {
      sd(k) = 1.0 / std::sqrt(basis.vals(k));
    } else {
      sd(k) = 0.0;
      ++zero_modes;
    }
  }
  if (zero_modes > 1 && warnings != nullptr)
    warnings->push_back("Laplacian is disconnected; all " + std::to_string(zero_modes) + " zero modes are suppressed");
  Matrix chi = sd.asDiagonal() * rng.normal_matrix(n, p);
  Matrix x = basis.vecs * chi;
  if (noise_var > 0.0) x += std::sqrt(noise_var) * rng.normal_matrix(n, p);
  return SignalSet(std::move(x));
}

double spectral_radius(const Matrix& m) {
  require(m.rows() == m.cols(), ErrorCode::BadDimension, "matrix must be square");
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SignalSet gen_sem(const ShiftOperator& W, const Vector& omega, const Matrix& inputs, double noise_var, Rng& rng) {
  const Index n = W.n();
  require(omega.size() == n, ErrorCode::BadDimension, "omega length mismatch");
  require(inputs.rows() == n, ErrorCode::BadDimension, "input rows must match vertex count");
  require(inputs.cols() >= 1, ErrorCode::BadParameter, "need at least one input column");
  require(noise_var >= 0.0, ErrorCode::BadParameter, "noise variance must be >= 0");
  if (spectral_radius(W.matrix()) >= 1.0) fail(ErrorCode::UnstableSEM, "spectral radius of W must be below 1");
  Matrix rhs = omega.asDiagonal() * inputs;
  if (noise_var > 0.0) rhs += std::sqrt(noise_var) * rng.normal_matrix(n, inputs.cols());
  Matrix IminusW = Matrix::Identity(n, n) - W.matrix();
  return SignalSet(IminusW.partialPivLu().solve(rhs));
}

Matrix gen_svar(const std::vector<Matrix>& lag_weights, Index t_len, double noise_var, Rng& rng) {
  require(!lag_weights.empty(), ErrorCode::BadParameter, "need at least one lag");
  require(t_len >= 1, ErrorCode::BadParameter, "series length must be positive");
  const Index n = lag_weights.front().rows();
  const Index lags = static_cast<Index>(lag_weights.size());
  for (const Matrix& w : lag_weights)
    require(w.rows() == n && w.cols() == n, ErrorCode::BadDimension, "lag matrices must be N x N");
  const Index burn = 10 * lags;
  const double sd = std::sqrt(noise_var);
  Matrix x = Matrix::Zero(n, t_len + burn);
  for (Index t = 0; t < t_len + burn; ++t) {
    Vector xt = Vector::Zero(n);
    for (Index l = 1; l <= lags; ++l)
      if (t - l >= 0) xt += lag_weights[static_cast<size_t>(l - 1)] * x.col(t - l);
    for (Index i = 0; i < n; ++i) xt(i) += sd * rng.normal();
    x.col(t) = xt;
  }
  return x.rightCols(t_len);
}

}  // namespace glk
