#include "glk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace glk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::CannotConnect: return "CannotConnect";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::UnstableSEM: return "UnstableSEM";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::SingularInputCovariance: return "SingularInputCovariance";
    case ErrorCode::NoMLE: return "NoMLE";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Adjacency: return "adjacency";
    case ShiftKind::Laplacian: return "laplacian";
    case ShiftKind::Precision: return "precision";
    case ShiftKind::Generic: return "generic";
  }
  return "generic";
}

ShiftKind shift_kind_from_string(std::string_view name) {
  if (name == "adjacency") return ShiftKind::Adjacency;
  if (name == "laplacian") return ShiftKind::Laplacian;
  if (name == "precision") return ShiftKind::Precision;
  if (name == "generic") return ShiftKind::Generic;
  fail(ErrorCode::BadInput, "unknown shift kind '" + std::string(name) + "'");
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

Index connected_components(const Matrix& m) {
  const Index n = m.rows();
  std::vector<Index> label(static_cast<size_t>(n), -1);
  Index count = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<size_t>(s)] >= 0) continue;
    label[static_cast<size_t>(s)] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      for (Index u = 0; u < n; ++u) {
        if (u == v || label[static_cast<size_t>(u)] >= 0) continue;
        if (m(v, u) != 0.0 || m(u, v) != 0.0) {
          label[static_cast<size_t>(u)] = count;
          stack.push_back(u);
        }
      }
    }
    ++count;
  }
  return count;
}

ShiftOperator::ShiftOperator(Matrix data, ShiftKind kind, bool directed)
    : data_(std::move(data)), kind_(kind), directed_(directed) {
  require(data_.rows() == data_.cols(), ErrorCode::BadDimension, "shift operator must be square");
  require(data_.allFinite(), ErrorCode::BadInput, "shift operator has non-finite entries");
  if (!directed_) require(is_symmetric(data_), ErrorCode::NotSymmetric, "undirected shift must be symmetric");
  const Index n = data_.rows();
  if (kind_ == ShiftKind::Adjacency) {
    for (Index i = 0; i < n; ++i) {
      require(data_(i, i) == 0.0, ErrorCode::InvalidWeight, "adjacency must have a zero diagonal");
      for (Index j = 0; j < n; ++j)
        require(data_(i, j) >= 0.0, ErrorCode::InvalidWeight, "adjacency weights must be nonnegative");
    }
  } else if (kind_ == ShiftKind::Laplacian) {
    for (Index i = 0; i < n; ++i) {
      require(std::abs(data_.row(i).sum()) <= kRowSumTol * std::max(1.0, data_(i, i)), ErrorCode::InvalidWeight,
              "Laplacian rows must sum to zero");
      for (Index j = 0; j < n; ++j)
        if (i != j) require(data_(i, j) <= 0.0, ErrorCode::InvalidWeight, "Laplacian off-diagonals must be <= 0");
    }
  }
}

std::vector<Edge> ShiftOperator::edges(double threshold) const {
  std::vector<Edge> out;
  const Index n = data_.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed_ ? 0 : i; j < n; ++j) {
      double v = data_(i, j);
      if (kind_ == ShiftKind::Laplacian) {
        if (i == j) continue;
        v = -v;
      }
      if ((kind_ == ShiftKind::Adjacency || kind_ == ShiftKind::Laplacian) && i == j) continue;
      if (std::abs(v) > threshold) out.push_back({i, j, v});
    }
  }
  return out;
}

Matrix laplacian_from_adjacency(const Matrix& W) {
  Matrix L = -W;
  L.diagonal().setZero();
  L.diagonal() = (W.rowwise().sum() - W.diagonal());
  return L;
}

Matrix adjacency_from_laplacian(const Matrix& L) {
  Matrix W = -L;
  W.diagonal().setZero();
  return W;
}

ShiftOperator build_shift(std::span<const Edge> edges, Index n, ShiftKind kind, bool directed) {
  require(n >= 1, ErrorCode::BadDimension, "vertex count must be positive");
  Matrix W = Matrix::Zero(n, n);
  const bool weighted_graph = kind == ShiftKind::Adjacency || kind == ShiftKind::Laplacian;
  for (const Edge& e : edges) {
    require(e.i >= 0 && e.i < n && e.j >= 0 && e.j < n, ErrorCode::BadIndex,
            "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") out of range");
    require(std::isfinite(e.w), ErrorCode::InvalidWeight, "edge weight must be finite");
    if (weighted_graph) {
      require(e.w >= 0.0, ErrorCode::InvalidWeight, "edge weights must be nonnegative");
      require(e.i != e.j, ErrorCode::InvalidWeight, "self-loops are not allowed for this kind");
    }
    W(e.i, e.j) = e.w;
    if (!directed) W(e.j, e.i) = e.w;
  }
  if (kind == ShiftKind::Laplacian) return ShiftOperator(laplacian_from_adjacency(W), kind, directed);
  return ShiftOperator(std::move(W), kind, directed);
}

void normalize_signs(Matrix& vecs) {
  for (Index k = 0; k < vecs.cols(); ++k) {
    const double peak = vecs.col(k).cwiseAbs().maxCoeff();
    for (Index i = 0; i < vecs.rows(); ++i) {
      if (std::abs(vecs(i, k)) >= peak * (1.0 - 1e-10)) {
        if (vecs(i, k) < 0.0) vecs.col(k) *= -1.0;
        break;
      }
    }
  }
}

std::vector<bool> SpectralBasis::ambiguous_modes() const {
  std::vector<bool> flags(static_cast<size_t>(vals.size()), false);
  for (const auto& [first, size] : degenerate_blocks)
    for (Index k = first; k < first + size; ++k) flags[static_cast<size_t>(k)] = true;
  return flags;
}

SpectralBasis eigendecompose(const Matrix& symmetric) {
  require(symmetric.rows() == symmetric.cols(), ErrorCode::BadDimension, "eigendecompose needs a square matrix");
  require(is_symmetric(symmetric, kSymmetryTol * std::max(1.0, symmetric.cwiseAbs().maxCoeff())),
          ErrorCode::NotSymmetric, "eigendecompose needs a symmetric matrix");
  const Matrix sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  require(es.info() == Eigen::Success, ErrorCode::BadInput, "eigendecomposition failed");
  SpectralBasis b;
  b.vals = es.eigenvalues();
  b.vecs = es.eigenvectors();
  normalize_signs(b.vecs);
  const Index n = b.vals.size();
  if (n == 0) return b;
  const double tol = kDegeneracyTol * std::max(1.0, b.vals.cwiseAbs().maxCoeff());
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || b.vals(k) - b.vals(k - 1) > tol) {
      if (k - start >= 2) b.degenerate_blocks.emplace_back(start, k - start);
      start = k;
    }
  }
  return b;
}

SpectralBasis eigendecompose(const ShiftOperator& s) {
  require(!s.directed() || is_symmetric(s.matrix()), ErrorCode::NotSymmetric,
          "eigendecompose needs a symmetric shift");
  return eigendecompose(s.matrix());
}

Vector gft(const Vector& x, const SpectralBasis& basis) {
  require(x.size() == basis.n(), ErrorCode::BadDimension, "signal length does not match basis");
  return basis.vecs.transpose() * x;
}

Vector igft(const Vector& xt, const SpectralBasis& basis) {
  require(xt.size() == basis.n(), ErrorCode::BadDimension, "coefficient length does not match basis");
  return basis.vecs * xt;
}

double total_variation(const Vector& x, const ShiftOperator& laplacian) {
  require(laplacian.kind() == ShiftKind::Laplacian, ErrorCode::WrongKind, "total variation needs a Laplacian");
  require(x.size() == laplacian.n(), ErrorCode::BadDimension, "signal length does not match graph");
  return std::max(0.0, x.dot(laplacian.matrix() * x));
}

FilterSpec::FilterSpec(Vector h) : coeffs(std::move(h)) {
  require(coeffs.size() >= 1, ErrorCode::BadParameter, "filter needs at least one tap");
  require(coeffs.allFinite(), ErrorCode::BadInput, "filter taps must be finite");
}

FilterSpec::FilterSpec(std::initializer_list<double> h) : FilterSpec(Vector(Eigen::Map<const Vector>(h.begin(), static_cast<Index>(h.size())))) {}

Matrix apply_filter(const Matrix& s, const FilterSpec& h, const Matrix& x) {
  require(s.rows() == s.cols() && x.rows() == s.rows(), ErrorCode::BadDimension, "filter input dimension mismatch");
  require(h.taps() >= 1 && h.taps() <= s.rows(), ErrorCode::BadDimension, "filter length must be in [1, N]");
  const Index L = h.taps();
  Matrix y = h.coeffs(L - 1) * x;
  for (Index l = L - 2; l >= 0; --l) y = (s * y + h.coeffs(l) * x).eval();
  return y;
}

Vector apply_filter(const ShiftOperator& s, const FilterSpec& h, const Vector& x) {
  return apply_filter(s.matrix(), h, Matrix(x)).col(0);
}

Matrix filter_matrix(const Matrix& s, const FilterSpec& h) {
  return apply_filter(s, h, Matrix::Identity(s.rows(), s.cols()));
}

Vector filter_freq_response(const FilterSpec& h, const SpectralBasis& basis) {
  const Index L = h.taps();
  Vector out(basis.n());
  for (Index i = 0; i < basis.n(); ++i) {
    double acc = h.coeffs(L - 1);
    for (Index l = L - 2; l >= 0; --l) acc = acc * basis.vals(i) + h.coeffs(l);
    out(i) = acc;
  }
  return out;
}

double stationarity_score(const Matrix& cov, const SpectralBasis& basis) {
  require(cov.rows() == basis.n() && cov.cols() == basis.n(), ErrorCode::BadDimension,
          "covariance does not match basis");
  const Matrix rotated = basis.vecs.transpose() * cov * basis.vecs;
  const double total = rotated.norm();
  if (total == 0.0) return 0.0;
  Matrix off = rotated;
  off.diagonal().setZero();
  return std::clamp(off.norm() / total, 0.0, 1.0);
}

PsdEstimate graph_psd(const Matrix& cov, const SpectralBasis& basis, double threshold) {
  PsdEstimate out;
  out.score = stationarity_score(cov, basis);
  out.stationary = out.score <= threshold;
  const Matrix rotated = basis.vecs.transpose() * cov * basis.vecs;
  out.psd = rotated.diagonal().cwiseMax(0.0);
  return out;
}

Reconstruction bandlimit_reconstruct(const Vector& x, const SpectralBasis& basis, Index k, CoefficientOrder order) {
  require(k >= 1 && k <= basis.n(), ErrorCode::BadK, "k must be in [1, N]");
  const Vector xt = gft(x, basis);
  std::vector<Index> idx(static_cast<size_t>(basis.n()));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (order == CoefficientOrder::Magnitude) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Index a, Index b) { return std::abs(xt(a)) > std::abs(xt(b)); });
  }
  Reconstruction r;
  r.kept.assign(idx.begin(), idx.begin() + k);
  Vector kept = Vector::Zero(basis.n());
  for (Index i : r.kept) kept(i) = xt(i);
  r.approx = igft(kept, basis);
  const double nx = x.norm();
  r.rel_err = nx > 0.0 ? (x - r.approx).norm() / nx : 0.0;
  return r;
}

SignalSet::SignalSet(Matrix data) : data_(std::move(data)) {
  require(data_.rows() >= 2, ErrorCode::BadDimension, "a signal set needs at least two vertices");
  require(data_.cols() >= 1, ErrorCode::TooFewSamples, "a signal set needs at least one sample");
  require(data_.allFinite(), ErrorCode::BadInput, "signals must be finite");
}

}  // namespace glk
