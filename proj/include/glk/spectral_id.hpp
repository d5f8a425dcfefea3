#pragma once

// Topology identification from stationary and diffused signals: covariance
// eigenbasis estimation, eigenvalue selection with spectral templates,
// graph-filter identification and network deconvolution.

#include <string>
#include <vector>

#include "glk/graph.hpp"
#include "glk/solvers.hpp"

namespace glk {

/// Eigenbasis of the sample covariance of X.
SpectralBasis estimate_eigenbasis(const SignalSet& X, bool centered = true);
/// Eigenbasis of a given (population or sample) covariance.
SpectralBasis estimate_eigenbasis(const Matrix& cov);

struct InferShiftResult {
  Matrix S;
  Vector eigenvalues;
  SolveTrace trace;
  double eps = 0.0;
  bool partial = false;         // degenerate modes were dropped
  std::vector<Index> kept_modes;
  double template_distance = 0.0;
};

struct InferShiftOptions {
  ShiftConstraintSet set{};
  double eps = 0.0;
  SparsityObjective objective = SparsityObjective::L1;
  bool route_degenerate = true;  // drop modes in degenerate blocks, keep the rest
};

InferShiftResult infer_shift(const SpectralBasis& basis, const InferShiftOptions& options,
                             const SolverConfig& config = {});

/// Templates are the columns of vk (N x K, orthonormal); the complement of
/// their span is left free.
InferShiftResult infer_shift_partial(const Matrix& vk, const ShiftConstraintSet& set, const SolverConfig& config = {},
                                     double eps = 0.0);

/// Distance between the constraint set and the matrices diagonalized by the
/// basis, by alternating projections.
double template_gap(const Matrix& vecs, const ShiftConstraintSet& set, int iters = 2000);

/// eps = kappa * template_gap. Sampling noise moves the eigenvectors off any
/// sparse shift; the gap measures how far.
double eps_heuristic(const Matrix& vecs, const ShiftConstraintSet& set, double kappa = 1.5);

/// Smallest eps on the grid (ascending) for which the problem is feasible.
double eps_grid_search(const SpectralBasis& basis, const ShiftConstraintSet& set, const std::vector<double>& grid,
                       const SolverConfig& config = {});

struct FilterEstimate {
  Matrix H;
  bool psd = false;
  std::string provenance;
};

FilterEstimate psd_filter_recover(const Matrix& cov_x, const Matrix& cov_w);

/// weights may be empty (uniform).
FilterEstimate psd_filter_ls(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                             const std::vector<double>& weights, const SolverConfig& config = {});

/// P_m / sum P_m.
std::vector<double> sample_size_weights(const std::vector<Index>& sample_sizes);

double psd_filter_ls_objective(const Matrix& H, const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                               const std::vector<double>& weights);

struct SymFilterResult {
  FilterEstimate estimate;
  std::vector<std::vector<int>> signs;  // b_m in {-1, +1}^N
  double residual = 0.0;
  long long tie_count = 1;  // sign assignments attaining the minimum
  bool identifiable = true;
  bool exhaustive = true;  // false when the search fell back to rounding
};

/// Candidate filter for process m: S_w^{-1/2} V diag(sqrt(lambda) o b) V' S_w^{-1/2},
/// with (V, lambda) the eigenpairs of S_w^{1/2} S_x S_w^{1/2}.
Matrix sym_filter_candidate(const Matrix& cov_x, const Matrix& cov_w, const std::vector<int>& signs);

SymFilterResult sym_filter_select(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                                  const SolverConfig& config = {});

InferShiftResult network_deconvolve(const Matrix& T, const ShiftConstraintSet& set, double eps = 0.0,
                                    const SolverConfig& config = {});

}  // namespace glk
