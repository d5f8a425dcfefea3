#pragma once

// Seeded synthetic data: random graphs, Gaussian graphical models, diffusion
// processes, smooth factor-model signals and SEM / SVAR cascades.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glk/graph.hpp"

namespace glk {

struct RngSpec {
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
};

/// Owns one generator stream. Not shareable across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(RngSpec{seed}) {}
  explicit Rng(const RngSpec& spec);

  std::mt19937_64& engine() { return engine_; }
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  /// rows x cols matrix of independent standard normals, filled column by column.
  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct WeightDist {
  double lo = 0.5;
  double hi = 1.5;  // lo == hi gives constant weights
};

ShiftOperator gen_er_graph(Index n, double p_edge, const WeightDist& weights, Rng& rng,
                           bool require_connected = false);

/// Columns are i.i.d. Normal(0, cov) drawn through the eigendecomposition of
/// cov; eigenvalues below 1e-12 relative are treated as zero.
Matrix sample_gaussian(const Matrix& cov, Index p, Rng& rng);

SignalSet sample_gmrf(const Matrix& precision, Index p, Rng& rng);

/// H Sigma_w H' for the filter H = sum_l h_l S^l; white input when input_cov is empty.
Matrix diffusion_covariance(const Matrix& S, const FilterSpec& h, const std::optional<Matrix>& input_cov = {});

SignalSet gen_diffusion(const ShiftOperator& S, const FilterSpec& h, Index p, const std::optional<Matrix>& input_cov,
                        Rng& rng);

/// x = V chi + e with chi_k ~ Normal(0, 1/lambda_k) on the nonzero modes of L.
/// A warning is appended when L has more than one zero mode.
SignalSet gen_smooth(const ShiftOperator& laplacian, Index p, double noise_var, Rng& rng,
                     std::vector<std::string>* warnings = nullptr);

/// x_t = (I - W)^{-1} (diag(omega) u_t + e_t) for every column u_t of inputs.
SignalSet gen_sem(const ShiftOperator& W, const Vector& omega, const Matrix& inputs, double noise_var, Rng& rng);

/// Largest eigenvalue modulus of a (possibly nonsymmetric) square matrix.
double spectral_radius(const Matrix& m);

/// x_t = sum_l W^(l) x_{t-l} + e_t, started from zeros with a burn-in of
/// 10 * lags samples that is discarded.
Matrix gen_svar(const std::vector<Matrix>& lag_weights, Index t_len, double noise_var, Rng& rng);

}  // namespace glk
