#include "glk/spectral_id.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "glk/statnet.hpp"

namespace glk {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_psd(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(H), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
}

void require_pair_lists(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w) {
  require(!cov_x.empty(), ErrorCode::BadInput, "need at least one covariance pair");
  require(cov_x.size() == cov_w.size(), ErrorCode::BadDimension, "covariance lists differ in length");
  const Index n = cov_x.front().rows();
  for (size_t m = 0; m < cov_x.size(); ++m) {
    require(cov_x[m].rows() == n && cov_x[m].cols() == n && cov_w[m].rows() == n && cov_w[m].cols() == n,
            ErrorCode::BadDimension, "all covariances must be N x N");
    require(cov_x[m].allFinite() && cov_w[m].allFinite(), ErrorCode::BadInput, "covariances must be finite");
  }
}

}  // namespace

SpectralBasis estimate_eigenbasis(const SignalSet& X, bool centered) {
  return eigendecompose(sample_covariance(X, centered));
}

SpectralBasis estimate_eigenbasis(const Matrix& cov) { return eigendecompose(cov); }

InferShiftResult infer_shift_partial(const Matrix& vk, const ShiftConstraintSet& set, const SolverConfig& config,
                                     double eps) {
  SpectralSolveResult r = admm_l1_spectral(vk, eps, set, config, SparsityObjective::L1);
  InferShiftResult out;
  out.S = std::move(r.S);
  out.eigenvalues = std::move(r.eigenvalues);
  out.trace = std::move(r.trace);
  out.eps = eps;
  out.partial = vk.cols() < vk.rows();
  out.template_distance = r.template_distance;
  for (Index k = 0; k < vk.cols(); ++k) out.kept_modes.push_back(k);
  return out;
}

InferShiftResult infer_shift(const SpectralBasis& basis, const InferShiftOptions& options, const SolverConfig& config) {
  const Index n = basis.n();
  std::vector<Index> kept;
  std::vector<bool> ambiguous = basis.ambiguous_modes();
  for (Index k = 0; k < n; ++k)
    if (!options.route_degenerate || !ambiguous[static_cast<size_t>(k)]) kept.push_back(k);
  Matrix templates(n, static_cast<Index>(kept.size()));
  for (size_t c = 0; c < kept.size(); ++c) templates.col(static_cast<Index>(c)) = basis.vecs.col(kept[c]);

  SpectralSolveResult r = admm_l1_spectral(templates, options.eps, options.set, config, options.objective);
  InferShiftResult out;
  out.S = std::move(r.S);
  out.eigenvalues = std::move(r.eigenvalues);
  out.trace = std::move(r.trace);
  out.eps = options.eps;
  out.partial = static_cast<Index>(kept.size()) < n;
  out.kept_modes = std::move(kept);
  out.template_distance = r.template_distance;
  if (out.partial)
    out.trace.warnings.push_back("degenerate covariance eigenvalues; " + std::to_string(n - out.kept_modes.size()) +
                                 " ambiguous modes left unconstrained");
  return out;
}

double template_gap(const Matrix& vecs, const ShiftConstraintSet& set, int iters) {
  require(iters >= 1, ErrorCode::BadParameter, "iteration count must be positive");
  const Index n = vecs.rows();
  Matrix S = dykstra_project(Matrix::Zero(n, n), set);
  double gap = 0.0;
  for (int it = 0; it < iters; ++it) {
    Matrix T = project_onto_templates(S, vecs);
    Matrix Sn = dykstra_project(T, set);
    gap = (Sn - project_onto_templates(Sn, vecs)).norm();
    double step = (Sn - S).norm();
    S = std::move(Sn);
    if (step <= 1e-12 * std::max(1.0, S.norm())) break;
  }
  return gap;
}

double eps_heuristic(const Matrix& vecs, const ShiftConstraintSet& set, double kappa) {
  require(kappa >= 1.0, ErrorCode::BadParameter, "kappa must be >= 1");
  return kappa * template_gap(vecs, set);
}

double eps_grid_search(const SpectralBasis& basis, const ShiftConstraintSet& set, const std::vector<double>& grid,
                       const SolverConfig& config) {
  require(!grid.empty(), ErrorCode::BadParameter, "empty eps grid");
  for (double eps : grid) {
    try {
      InferShiftOptions opts;
      opts.set = set;
      opts.eps = eps;
      infer_shift(basis, opts, config);
      return eps;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible) throw;
    }
  }
  fail(ErrorCode::Infeasible, "no eps on the grid gives a feasible problem");
}

// ---------------------------------------------------------------------------
// Filter identification

FilterEstimate psd_filter_recover(const Matrix& cov_x, const Matrix& cov_w) {
  require(cov_x.rows() == cov_x.cols() && cov_w.rows() == cov_w.cols() && cov_x.rows() == cov_w.rows(),
          ErrorCode::BadDimension, "covariances must be N x N");
  Matrix inv_root = psd_inv_sqrt(cov_w);
  Matrix root = psd_sqrt(cov_w);
  Matrix H = sym(inv_root * psd_sqrt(sym(root * cov_x * root)) * inv_root);
  return {H, is_psd(H), "closed-form"};
}

std::vector<double> sample_size_weights(const std::vector<Index>& sample_sizes) {
  require(!sample_sizes.empty(), ErrorCode::BadInput, "no sample sizes");
  double total = 0.0;
  for (Index p : sample_sizes) {
    require(p >= 1, ErrorCode::BadParameter, "sample sizes must be positive");
    total += static_cast<double>(p);
  }
  std::vector<double> w;
  for (Index p : sample_sizes) w.push_back(static_cast<double>(p) / total);
  return w;
}

namespace {

struct LsTerms {
  std::vector<Matrix> A;  // (B S_x B)^{1/2}
  std::vector<Matrix> B;  // S_w^{1/2}
  std::vector<double> w;
};

LsTerms ls_terms(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w, const std::vector<double>& weights) {
  require_pair_lists(cov_x, cov_w);
  const size_t m = cov_x.size();
  require(weights.empty() || weights.size() == m, ErrorCode::BadDimension, "weight count mismatch");
  LsTerms t;
  for (size_t k = 0; k < m; ++k) {
    psd_inv_sqrt(cov_w[k]);  // positive definiteness check
    Matrix B = psd_sqrt(cov_w[k]);
    t.A.push_back(psd_sqrt(sym(B * cov_x[k] * B)));
    t.B.push_back(std::move(B));
    double w = weights.empty() ? 1.0 / static_cast<double>(m) : weights[k];
    require(w >= 0.0 && std::isfinite(w), ErrorCode::BadParameter, "weights must be >= 0");
    t.w.push_back(w);
  }
  return t;
}

double ls_value(const Matrix& H, const LsTerms& t) {
  double f = 0.0;
  for (size_t k = 0; k < t.A.size(); ++k) f += t.w[k] * (t.A[k] - t.B[k] * H * t.B[k]).squaredNorm();
  return f;
}

}  // namespace

double psd_filter_ls_objective(const Matrix& H, const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                               const std::vector<double>& weights) {
  return ls_value(H, ls_terms(cov_x, cov_w, weights));
}

FilterEstimate psd_filter_ls(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                             const std::vector<double>& weights, const SolverConfig& config) {
  config.validate();
  LsTerms t = ls_terms(cov_x, cov_w, weights);
  const Index n = cov_x.front().rows();
  const size_t m = t.A.size();

  Matrix H = Matrix::Identity(n, n);
  if (n <= 40) {
    // Unconstrained minimizer from the normal equations in vec form.
    Matrix K = Matrix::Zero(n * n, n * n);
    Vector rhs = Vector::Zero(n * n);
    for (size_t k = 0; k < m; ++k) {
      Matrix B2 = t.B[k] * t.B[k];
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) K.block(a * n, b * n, n, n) += t.w[k] * B2(a, b) * B2;
      Matrix BAB = t.B[k] * t.A[k] * t.B[k];
      rhs += t.w[k] * Eigen::Map<const Vector>(BAB.data(), n * n);
    }
    Vector h = K.ldlt().solve(rhs);
    H = sym(Eigen::Map<const Matrix>(h.data(), n, n));
    if (is_psd(H)) return {H, true, "least-squares"};
    H = project_psd(H);
  }

  double lip = 0.0;
  for (size_t k = 0; k < m; ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(t.B[k], Eigen::EigenvaluesOnly);
    lip += 2.0 * t.w[k] * std::pow(es.eigenvalues().maxCoeff(), 4);
  }
  require(lip > 0.0, ErrorCode::BadInput, "all weights are zero");
  Matrix Y = H;
  double theta = 1.0;
  for (int it = 0; it < config.max_iters; ++it) {
    Matrix grad = Matrix::Zero(n, n);
    for (size_t k = 0; k < m; ++k) grad += 2.0 * t.w[k] * t.B[k] * (t.B[k] * Y * t.B[k] - t.A[k]) * t.B[k];
    Matrix Hn = project_psd(Y - grad / lip);
    double theta_n = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    Y = Hn + ((theta - 1.0) / theta_n) * (Hn - H);
    double step = (Hn - H).norm();
    H = std::move(Hn);
    theta = theta_n;
    if (step <= config.tol * std::max(1.0, H.norm())) break;
  }
  return {H, true, "projected-gradient"};
}

// ---------------------------------------------------------------------------
// Symmetric filters

Matrix sym_filter_candidate(const Matrix& cov_x, const Matrix& cov_w, const std::vector<int>& signs) {
  const Index n = cov_x.rows();
  require(static_cast<Index>(signs.size()) == n, ErrorCode::BadDimension, "sign vector length mismatch");
  Matrix P = psd_inv_sqrt(cov_w);
  Matrix B = psd_sqrt(cov_w);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(B * cov_x * B));
  Vector d(n);
  for (Index k = 0; k < n; ++k) d(k) = std::sqrt(std::max(0.0, es.eigenvalues()(k))) * signs[static_cast<size_t>(k)];
  return sym(P * es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose() * P);
}

namespace {

constexpr int kMaxExhaustiveBits = 26;

// Columns of A_m: vec(P v_k v_k' P) sqrt(lambda_k).
Matrix candidate_basis(const Matrix& cov_x, const Matrix& cov_w) {
  const Index n = cov_x.rows();
  Matrix P = psd_inv_sqrt(cov_w);
  Matrix B = psd_sqrt(cov_w);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(B * cov_x * B));
  Matrix A(n * n, n);
  for (Index k = 0; k < n; ++k) {
    Vector pv = P * es.eigenvectors().col(k);
    Matrix outer = pv * pv.transpose() * std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    A.col(k) = Eigen::Map<const Vector>(outer.data(), n * n);
  }
  return A;
}

}  // namespace

SymFilterResult sym_filter_select(const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w,
                                  const SolverConfig& config) {
  config.validate();
  require_pair_lists(cov_x, cov_w);
  const Index n = cov_x.front().rows();
  if (n > 16) fail(ErrorCode::TooLarge, "sign search supports N <= 16; use the PSD estimator for larger graphs");
  const Index mcount = static_cast<Index>(cov_x.size());
  const Index bits = mcount * n;

  std::vector<Matrix> A;
  for (Index m = 0; m < mcount; ++m) A.push_back(candidate_basis(cov_x[static_cast<size_t>(m)], cov_w[static_cast<size_t>(m)]));
  // J(b) = sum_{m,m'} ||A_m b_m - A_m' b_m'||^2 = b' Q b
  Matrix Q = Matrix::Zero(bits, bits);
  double scale = 0.0;
  for (Index m = 0; m < mcount; ++m) {
    for (Index mp = 0; mp < mcount; ++mp) Q.block(m * n, mp * n, n, n) -= 2.0 * A[m].transpose() * A[mp];
    Q.block(m * n, m * n, n, n) += 2.0 * static_cast<double>(mcount) * A[m].transpose() * A[m];
    scale += A[m].squaredNorm();
  }
  const double tie_tol = 1e-9 * std::max(1.0, 2.0 * static_cast<double>(mcount) * scale);

  SymFilterResult out;
  Vector best_b;
  double best = std::numeric_limits<double>::infinity();
  if (bits - 1 <= kMaxExhaustiveBits) {
    // Gray-code walk over the free bits; bit 0 stays +1 (the global sign is
    // fixed afterwards). State bit 1 means -1.
    const long long total = 1LL << (bits - 1);
    Vector b = Vector::Ones(bits);
    Vector qb = Q * b;
    double J = b.dot(qb);
    unsigned long long best_code = 0;
    long long ties = 0;
    unsigned long long code = 0;
    for (long long step = 0; step < total; ++step) {
      if (step > 0) {
        int flip = __builtin_ctzll(static_cast<unsigned long long>(step)) + 1;
        code ^= 1ULL << flip;
        double bk = b(flip);
        J += -4.0 * bk * qb(flip) + 4.0 * Q(flip, flip);
        qb -= 2.0 * bk * Q.col(flip);
        b(flip) = -bk;
      }
      if (J < best - tie_tol) {
        best = J;
        best_code = code;
        ties = 1;
      } else if (J <= best + tie_tol) {
        ++ties;
        if (J < best) best = J;
        if (code < best_code) best_code = code;
      }
    }
    best_b = Vector::Ones(bits);
    for (Index k = 0; k < bits; ++k)
      if ((best_code >> k) & 1ULL) best_b(k) = -1.0;
    best = best_b.dot(Q * best_b);
    out.tie_count = 2 * ties;
    out.exhaustive = true;
  } else {
    // Local search from the all-positive start and from each process's
    // rounding toward process 0; single flips until no improvement.
    out.exhaustive = false;
    std::vector<Vector> starts;
    starts.push_back(Vector::Ones(bits));
    for (Index r = 1; r < mcount; ++r) {
      Vector s = Vector::Ones(bits);
      Vector target = A[0] * Vector::Ones(n);
      for (Index m = 1; m < mcount; ++m) {
        Vector ls = A[m].colPivHouseholderQr().solve(target);
        for (Index k = 0; k < n; ++k) s(m * n + k) = ls(k) >= 0.0 ? 1.0 : -1.0;
      }
      starts.push_back(s);
    }
    for (Vector b : starts) {
      Vector qb = Q * b;
      double J = b.dot(qb);
      for (int pass = 0; pass < 1000; ++pass) {
        bool improved = false;
        for (Index k = 1; k < bits; ++k) {
          double delta = -4.0 * b(k) * qb(k) + 4.0 * Q(k, k);
          if (delta < -tie_tol) {
            J += delta;
            qb -= 2.0 * b(k) * Q.col(k);
            b(k) = -b(k);
            improved = true;
          }
        }
        if (!improved) break;
      }
      if (J < best) {
        best = J;
        best_b = b;
      }
    }
    out.tie_count = 2;
    out.estimate.provenance = "sign-local-search";
  }

  Matrix H = Matrix::Zero(n, n);
  for (Index m = 0; m < mcount; ++m) {
    std::vector<int> s(static_cast<size_t>(n));
    for (Index k = 0; k < n; ++k) s[static_cast<size_t>(k)] = best_b(m * n + k) > 0 ? 1 : -1;
    H += sym_filter_candidate(cov_x[static_cast<size_t>(m)], cov_w[static_cast<size_t>(m)], s);
    out.signs.push_back(std::move(s));
  }
  H /= static_cast<double>(mcount);
  if (H.trace() < 0.0) {
    H = -H;
    for (auto& s : out.signs)
      for (int& v : s) v = -v;
  }
  out.estimate.H = sym(H);
  out.estimate.psd = is_psd(out.estimate.H);
  if (out.estimate.provenance.empty()) out.estimate.provenance = "sign-enumeration";
  out.residual = std::max(0.0, best);
  out.identifiable = out.tie_count <= 2;
  return out;
}

InferShiftResult network_deconvolve(const Matrix& T, const ShiftConstraintSet& set, double eps,
                                    const SolverConfig& config) {
  require(T.rows() == T.cols(), ErrorCode::BadDimension, "T must be square");
  SpectralBasis basis = eigendecompose(T);
  InferShiftOptions opts;
  opts.set = set;
  opts.eps = eps;
  return infer_shift(basis, opts, config);
}

}  // namespace glk
