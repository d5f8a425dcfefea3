#include "glk/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace glk {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == a.cols(), ErrorCode::BadDimension,
          "matrices must be square with equal sizes");
}

std::vector<std::pair<Index, Index>> pairs_of(Index n, bool directed) {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < n; ++i)
    for (Index j = directed ? 0 : i + 1; j < n; ++j)
      if (i != j) out.emplace_back(i, j);
  return out;
}

double resolve(double threshold, const Matrix& m) {
  return threshold < 0.0 ? default_support_threshold(m) : threshold;
}

double optimal_scale(const Matrix& s_hat, const Matrix& s_true) {
  const double denom = s_hat.squaredNorm();
  return denom > 0.0 ? s_hat.cwiseProduct(s_true).sum() / denom : 0.0;
}

}  // namespace

double default_support_threshold(const Matrix& m) {
  double peak = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j) peak = std::max(peak, std::abs(m(i, j)));
  return 1e-6 * peak;
}

EvalReport edge_prf(const Matrix& s_hat, const Matrix& s_true, double threshold, bool directed) {
  require_same_shape(s_hat, s_true);
  const double th_hat = resolve(threshold, s_hat);
  const double th_true = resolve(threshold, s_true);
  EvalReport r;
  for (auto [i, j] : pairs_of(s_hat.rows(), directed)) {
    bool est = std::abs(s_hat(i, j)) > th_hat;
    bool tru = std::abs(s_true(i, j)) > th_true;
    if (est && tru) ++r.true_positives;
    if (est && !tru) ++r.false_positives;
    if (!est && tru) ++r.false_negatives;
  }
  const Index est_count = r.true_positives + r.false_positives;
  const Index true_count = r.true_positives + r.false_negatives;
  if (est_count == 0 && true_count == 0) {
    r.precision = r.recall = r.f_score = 1.0;
  } else {
    r.precision = est_count > 0 ? static_cast<double>(r.true_positives) / static_cast<double>(est_count) : 0.0;
    r.recall = true_count > 0 ? static_cast<double>(r.true_positives) / static_cast<double>(true_count) : 0.0;
    r.f_score = f_score(r.precision, r.recall);
  }
  r.scale_error = s_true.squaredNorm() > 0.0 ? scale_aligned_error(s_hat, s_true)
                                             : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<std::pair<Index, double>> topk_recovery_curve(const Matrix& s_hat, const Matrix& s_true,
                                                          const std::vector<Index>& ks, double threshold,
                                                          bool directed) {
  require_same_shape(s_hat, s_true);
  require(std::is_sorted(ks.begin(), ks.end()), ErrorCode::BadParameter, "k values must be ascending");
  const double th_true = resolve(threshold, s_true);
  auto pairs = pairs_of(s_hat.rows(), directed);
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(s_hat(pairs[a].first, pairs[a].second)) > std::abs(s_hat(pairs[b].first, pairs[b].second));
  });
  Index total = 0;
  for (auto [i, j] : pairs) total += std::abs(s_true(i, j)) > th_true ? 1 : 0;

  std::vector<std::pair<Index, double>> curve;
  Index hits = 0;
  size_t taken = 0;
  for (Index k : ks) {
    require(k >= 0, ErrorCode::BadParameter, "k must be >= 0");
    while (taken < order.size() && static_cast<Index>(taken) < k) {
      auto [i, j] = pairs[order[taken]];
      hits += std::abs(s_true(i, j)) > th_true ? 1 : 0;
      ++taken;
    }
    curve.emplace_back(k, total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 1.0);
  }
  return curve;
}

double scale_aligned_error(const Matrix& s_hat, const Matrix& s_true) {
  require_same_shape(s_hat, s_true);
  const double truth = s_true.norm();
  require(truth > 0.0, ErrorCode::BadInput, "reference matrix is zero");
  if (s_hat.squaredNorm() == 0.0) return 1.0;
  return (optimal_scale(s_hat, s_true) * s_hat - s_true).norm() / truth;
}

double scale_aligned_max_abs_error(const Matrix& s_hat, const Matrix& s_true) {
  require_same_shape(s_hat, s_true);
  return (optimal_scale(s_hat, s_true) * s_hat - s_true).cwiseAbs().maxCoeff();
}

}  // namespace glk
