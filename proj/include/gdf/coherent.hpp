#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gdf/basis.hpp"
#include "gdf/rng.hpp"

namespace gdf::coherent {

using Complex = std::complex<double>;

/// 2x2 complex contraction parameterizing a generalized coherent state.
/// Invariant: spectral norm strictly below 1 (1 - Lambda Lambda^dag positive
/// definite), enforced at construction with a 1e-12 boundary tolerance.
class LambdaMatrix {
 public:
  explicit LambdaMatrix(const Eigen::Matrix2cd& m);
  LambdaMatrix(Complex l11, Complex l12, Complex l21, Complex l22);

  const Eigen::Matrix2cd& matrix() const { return m_; }

 private:
  Eigen::Matrix2cd m_;
};

/// Squared singular values of a LambdaMatrix, ordered x >= y.
struct SingularPair {
  double x = 0.0;
  double y = 0.0;
};

/// True iff every squared singular value is <= eta (inclusive, 1e-12
/// tolerance on the boundary).
bool in_region(const LambdaMatrix& L, double eta);

SingularPair singular_squares(const LambdaMatrix& L);

/// Full SVD factors Lambda = u diag(sqrt(x), sqrt(y)) v^dag, on demand.
struct SvdFactors {
  Eigen::Matrix2cd u;
  Eigen::Matrix2cd v;
  SingularPair squares;
};
SvdFactors svd_factors(const LambdaMatrix& L);

/// ln det(1 - Lambda Lambda^dag); always < 0 inside the domain.
double log_det_one_minus(const LambdaMatrix& L);

/// <0|Lambda, n> = det(1 - Lambda Lambda^dag)^{n/2} = (1-x)^{n/2} (1-y)^{n/2}.
double vacuum_overlap(const LambdaMatrix& L, std::uint64_t n);

/// Coefficients of |Lambda, n> on the monomial vectors Z^a |0>, all
/// |a| <= K, in BasisSet order:
///   c_a = det(1 - Lambda Lambda^dag)^{n/2} l11^i l12^j l21^k l22^l / (i! j! k! l!).
std::vector<Complex> coherent_coeffs(const LambdaMatrix& L, std::uint64_t n,
                                     const subspace::BasisSet& basis);

/// Same without the det^{n/2} normalization (the expansion of
/// exp(sum l_ij Z_ij)|0> alone).
std::vector<Complex> coherent_coeffs_unnormalized(const LambdaMatrix& L,
                                                  const subspace::BasisSet& basis);

/// <Lambda1, n | Lambda2, n>
///   = det(1-L1 L1^dag)^{n/2} det(1-L2 L2^dag)^{n/2} det(1 - L1^dag L2)^{-n}.
/// Derived closed form; certified against the truncated Fock inner product
/// before anything downstream relies on it.
Complex overlap(const LambdaMatrix& L1, const LambdaMatrix& L2, std::uint64_t n);

/// Radial density q(x, y) = (n-1)(n-2)^2(n-3) (x-y)^2 / (2 (1-x)^4 (1-y)^4).
double q_density(double x, double y, std::uint64_t n);

/// Sample (x, y) ~ q restricted to [0, eta]^2. Rejection sampling: proposal
/// density proportional to 1/((1-x)^4 (1-y)^4) per coordinate (closed-form
/// inverse CDF), acceptance ratio (x-y)^2 / eta^2. The expected acceptance is
/// E_proposal[(x-y)^2]/eta^2; it degrades near eta -> 1 where the proposal
/// concentrates both coordinates at the boundary.
SingularPair sample_radial(double eta, std::uint64_t n, Rng& rng);

/// Haar-distributed 2x2 unitary via QR of a complex Gaussian matrix with the
/// R-diagonal phase correction.
Eigen::Matrix2cd haar_u2(Rng& rng);

/// Lambda = u diag(sqrt x, sqrt y) v^dag with (x, y) from sample_radial and
/// u, v independent Haar on U(2).
LambdaMatrix sample_lambda(double eta, std::uint64_t n, Rng& rng);

/// Weight of the 2K-photon block of |Lambda, n><Lambda, n|:
///   sum_{k1+k2=K} C(n+k1-1, k1) C(n+k2-1, k2) (1-x)^n (1-y)^n x^{k1} y^{k2},
/// accumulated in log domain.
double photon_block_weight(std::uint64_t K, std::uint64_t n, const SingularPair& s);

}  // namespace gdf::coherent
