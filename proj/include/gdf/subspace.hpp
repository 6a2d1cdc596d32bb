#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gdf/basis.hpp"
#include "gdf/coherent.hpp"
#include "gdf/log_real.hpp"
#include "gdf/params.hpp"

namespace gdf::subspace {

using Complex = std::complex<double>;

/// Gram matrix G_ab = <Z^a vac | Z^b vac> over BasisSet(K), from the overlap
/// generating function: G_ab = a! b! [coefficient of lbar^a lprime^b] in
/// det(1 - Lambda^dag Lambda')^{-n}, expanded as a truncated power series
/// with integer coefficients (binomial series of det(1-W)^{-n} in
/// W = Lambda^dag Lambda'). Exact 128-bit integer arithmetic up to K = 8 and
/// moderate n, double beyond. Exactly block diagonal across total degree.
Eigen::MatrixXd gram_matrix(std::uint64_t n, std::uint32_t K);

enum class Sampling {
  /// Sample Lambda from the normalized restriction of the invariant measure
  /// (via coherent::sample_lambda) and average T(n,eta) c c^dag. Matches the
  /// defining integral term by term; per-sample variance grows with T(n,eta),
  /// which makes it unusable near eta -> 1.
  Direct,
  /// Importance-sample the radial part from the vacuum-weighted density
  /// proportional to (x-y)^2 (1-x)^{n-4} (1-y)^{n-4}; the weight cancels the
  /// det^{n/2} factors exactly, leaving a bounded integrand whose variance is
  /// uniform in eta.
  VacuumWeighted,
};

/// Monte-Carlo estimate of M_ab = <e_a| P_eta |e_b> over BasisSet(K),
/// M = G Chat G with Chat the estimated coefficient-space integral.
/// Batch-means error estimates with 100 batches; batches are independent
/// substreams of `seed`, reduced in fixed order, so results are reproducible
/// and independent of the thread count.
struct GramOperatorPair {
  Eigen::MatrixXd G;
  Eigen::MatrixXcd M;
  Eigen::MatrixXd M_stderr;             // entrywise standard errors
  std::vector<Eigen::MatrixXcd> batch_C;  // per-batch coefficient estimates
  std::vector<std::uint64_t> batch_samples;
  std::uint64_t n = 0;
  std::uint32_t K = 0;
  double eta = 0.0;
  std::uint64_t sample_count = 0;
  Sampling strategy = Sampling::Direct;
};

GramOperatorPair operator_matrix_P_eta(std::uint64_t n, std::uint32_t K, double eta,
                                       std::uint64_t samples, std::uint64_t seed,
                                       Sampling strategy = Sampling::Direct,
                                       unsigned threads = 0);

/// Exact normalization of the vacuum-weighted density on [0, eta]^2:
/// Z_eta = integral of q(x,y) (1-x)^n (1-y)^n over [0, eta]^2, via incomplete
/// Beta moments. Z_1 = 1. Also the exact vacuum diagonal <0|P_eta|0>.
double vacuum_weight_normalization(std::uint64_t n, double eta);

/// Extremal generalized eigenvalues of M v = lambda G v, via unit-norm
/// prescaling of the basis followed by whitening with G^{-1/2} and a
/// symmetric eigensolve. Refuses (ill-conditioned-gram) when the prescaled
/// Gram condition number exceeds 1e12.
struct ExtremalEigs {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Eigen::VectorXcd vec_min;  // original coordinates, v^dag G v = 1
  Eigen::VectorXcd vec_max;
  double gram_condition = 0.0;
};
ExtremalEigs generalized_extremal_eigs(const Eigen::MatrixXcd& M, const Eigen::MatrixXd& G);

/// Numerical certificate for the approximate resolution of identity on
/// V_{<=K}: extremal eigenvalues of P_eta restricted to the subspace, their
/// Monte-Carlo errors, and the closed-form epsilon of the operator
/// inequality. Verdicts use 3-sigma margins.
///
/// The spectrum of P_eta on V_{<=K} is nearly degenerate at 1, so the
/// extremal eigenvalues of the full-sample estimate carry an outward
/// O(||noise||) bias that no per-direction sigma can absorb. lambda_min and
/// lambda_max are therefore holdout estimates: extremal eigenvectors are
/// located on the first half of the batches and their quadratic forms
/// re-estimated on the second half, which is unbiased for a Rayleigh
/// quotient inside [true lambda_min, true lambda_max]. The raw full-sample
/// extremal eigenvalues are reported alongside.
struct DefinettiReport {
  std::uint64_t n = 0;
  std::uint32_t K = 0;
  double eta = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Sampling strategy = Sampling::VacuumWeighted;
  double lambda_min = 0.0;       // holdout estimate along the minimizing direction
  double lambda_max = 0.0;       // holdout estimate along the maximizing direction
  double stderr_min = 0.0;
  double stderr_max = 0.0;
  double lambda_min_full = 0.0;  // raw extremal eigenvalues of the full estimate
  double lambda_max_full = 0.0;
  double gram_condition = 0.0;
  LogReal eps_bound;
  bool eps_vacuous = false;
  bool verdict_upper = false;  // lambda_max <= 1 + 3 sigma
  bool verdict_lower = false;  // lambda_min >= 1 - eps - 3 sigma (when eps < 1)

  bool passed() const { return verdict_upper && (eps_vacuous || verdict_lower); }
};

DefinettiReport verify_definetti(std::uint64_t n, std::uint32_t K, double eta,
                                 std::uint64_t samples, std::uint64_t seed,
                                 Sampling strategy = Sampling::VacuumWeighted,
                                 unsigned threads = 0);

/// <Lambda| Pi_{=K} |Lambda> through the degree-K Gram block; must agree with
/// coherent::photon_block_weight.
double photon_block_via_gram(const coherent::LambdaMatrix& L, std::uint64_t n,
                             std::uint32_t K);

}  // namespace gdf::subspace
