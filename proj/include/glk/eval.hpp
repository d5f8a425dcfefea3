#pragma once

// Support-recovery metrics and scale-invariant errors for estimated graphs.

#include <utility>
#include <vector>

#include "glk/graph.hpp"

namespace glk {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  Index true_positives = 0;
  Index false_positives = 0;
  Index false_negatives = 0;
  double scale_error = 0.0;  // NaN when the reference is zero
  std::vector<std::pair<Index, double>> curve;  // (k, fraction of true edges recovered)
};

/// 1e-6 * max |entry| (off-diagonal).
double default_support_threshold(const Matrix& m);

/// Supports are |entry| > threshold over i < j, or over i != j when directed.
/// A negative threshold selects the default for each matrix separately.
EvalReport edge_prf(const Matrix& s_hat, const Matrix& s_true, double threshold = -1.0, bool directed = false);

/// Fraction of true edges among the k largest |entries| of s_hat, per k.
/// Ties go to the lexicographically smaller pair.
std::vector<std::pair<Index, double>> topk_recovery_curve(const Matrix& s_hat, const Matrix& s_true,
                                                          const std::vector<Index>& ks, double threshold = -1.0,
                                                          bool directed = false);

/// min_c ||c S_hat - S||_F / ||S||_F; 1 when S_hat = 0.
double scale_aligned_error(const Matrix& s_hat, const Matrix& s_true);

/// max |c* S_hat - S| with the same optimal c*.
double scale_aligned_max_abs_error(const Matrix& s_hat, const Matrix& s_true);

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace glk
