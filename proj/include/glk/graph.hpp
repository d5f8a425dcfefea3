#pragma once

// Graph-shift operators, spectral bases and the basic graph signal processing
// toolbox (GFT, total variation, polynomial filters, stationarity).

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "glk/error.hpp"

namespace glk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kRowSumTol = 1e-9;
inline constexpr double kDegeneracyTol = 1e-8;

enum class ShiftKind { Adjacency, Laplacian, Precision, Generic };

std::string_view to_string(ShiftKind kind);
ShiftKind shift_kind_from_string(std::string_view name);

struct Edge {
  Index i = 0;
  Index j = 0;
  double w = 1.0;
};

/// Dense N x N matrix describing a graph, tagged with what it represents.
/// Construction validates the invariants of the tag; the value is immutable
/// afterwards.
class ShiftOperator {
 public:
  ShiftOperator(Matrix data, ShiftKind kind, bool directed = false);

  Index n() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }
  ShiftKind kind() const { return kind_; }
  bool directed() const { return directed_; }

  /// Edge list implied by the sparsity pattern. For undirected operators only
  /// i < j is reported; weights are adjacency weights (i.e. -L_ij for a
  /// Laplacian) and raw entries otherwise.
  std::vector<Edge> edges(double threshold = 0.0) const;

 private:
  Matrix data_;
  ShiftKind kind_;
  bool directed_;
};

ShiftOperator build_shift(std::span<const Edge> edges, Index n, ShiftKind kind, bool directed = false);

/// L = diag(W 1) - W.
Matrix laplacian_from_adjacency(const Matrix& W);
/// W = -offdiag(L).
Matrix adjacency_from_laplacian(const Matrix& L);

bool is_symmetric(const Matrix& m, double tol = kSymmetryTol);

/// Number of connected components of the undirected graph whose edges are
/// the nonzero off-diagonal entries of m.
Index connected_components(const Matrix& m);

/// Orthonormal eigenbasis of a symmetric matrix with ascending eigenvalues.
/// Columns are sign-normalized: the largest-magnitude coordinate is positive
/// (lowest index wins ties). Clusters of eigenvalues closer than
/// kDegeneracyTol (scaled by max(1, |lambda|_max)) are recorded as blocks.
struct SpectralBasis {
  Matrix vecs;
  Vector vals;
  std::vector<std::pair<Index, Index>> degenerate_blocks;  // (first, size), size >= 2

  Index n() const { return vals.size(); }
  bool degenerate() const { return !degenerate_blocks.empty(); }
  /// Per-mode flag: true when the mode sits in a rotation-ambiguous block.
  std::vector<bool> ambiguous_modes() const;
};

SpectralBasis eigendecompose(const ShiftOperator& s);
SpectralBasis eigendecompose(const Matrix& symmetric);

void normalize_signs(Matrix& vecs);

Vector gft(const Vector& x, const SpectralBasis& basis);
Vector igft(const Vector& xt, const SpectralBasis& basis);

/// x' L x for a Laplacian shift.
double total_variation(const Vector& x, const ShiftOperator& laplacian);

struct FilterSpec {
  Vector coeffs;  // h_0 ... h_{L-1}

  FilterSpec() = default;
  explicit FilterSpec(Vector h);
  FilterSpec(std::initializer_list<double> h);

  Index taps() const { return coeffs.size(); }
};

/// y = sum_l h_l S^l x evaluated with Horner's rule.
Vector apply_filter(const ShiftOperator& s, const FilterSpec& h, const Vector& x);
Matrix apply_filter(const Matrix& s, const FilterSpec& h, const Matrix& x);
/// The filter as an explicit N x N matrix.
Matrix filter_matrix(const Matrix& s, const FilterSpec& h);

/// Frequency response Psi h with Psi_ij = lambda_i^j.
Vector filter_freq_response(const FilterSpec& h, const SpectralBasis& basis);

/// ||offdiag(V' C V)||_F / ||V' C V||_F; zero iff C is diagonalized by V.
double stationarity_score(const Matrix& cov, const SpectralBasis& basis);

struct PsdEstimate {
  Vector psd;
  double score = 0.0;
  bool stationary = true;  // score below the threshold used
};

PsdEstimate graph_psd(const Matrix& cov, const SpectralBasis& basis, double threshold = 1e-6);

enum class CoefficientOrder { Frequency, Magnitude };

struct Reconstruction {
  Vector approx;
  double rel_err = 0.0;
  std::vector<Index> kept;
};

Reconstruction bandlimit_reconstruct(const Vector& x, const SpectralBasis& basis, Index k,
                                     CoefficientOrder order = CoefficientOrder::Magnitude);

/// N x P observation matrix, one graph signal per column.
class SignalSet {
 public:
  explicit SignalSet(Matrix data);

  Index n() const { return data_.rows(); }
  Index p() const { return data_.cols(); }
  const Matrix& data() const { return data_; }

 private:
  Matrix data_;
};

}  // namespace glk
