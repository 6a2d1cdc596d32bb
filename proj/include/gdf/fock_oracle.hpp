#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gdf/basis.hpp"
#include "gdf/coherent.hpp"
#include "gdf/rng.hpp"

namespace gdf::fock {

using Complex = std::complex<double>;
using SparseOperator = Eigen::SparseMatrix<Complex>;

/// Occupation numbers of the 4n optical modes, laid out as
/// [a_1..a_n, b_1..b_n, a'_1..a'_n, b'_1..b'_n].
using Occupation = std::vector<std::uint8_t>;

/// Dense truncated Fock space over `mode_count` modes with a global cap on
/// the total photon number. Basis ordering is graded lexicographic
/// (ascending total, then lex on the occupation tuple), deterministic.
///
/// The oracle exists to certify small instances; construction refuses
/// (resource-guard) once the estimated dimension passes kMaxDimension.
class FockSpace {
 public:
  static constexpr std::size_t kMaxDimension = 400000;

  FockSpace(std::uint32_t mode_count, std::uint32_t max_total_photons);

  static double dimension_estimate(std::uint32_t mode_count, std::uint32_t max_total);

  std::uint32_t mode_count() const { return modes_; }
  std::uint32_t max_total_photons() const { return cutoff_; }
  std::size_t size() const { return basis_.size(); }
  const Occupation& occupation(std::size_t idx) const { return basis_[idx]; }
  std::size_t index_of(const Occupation& occ) const;
  std::uint32_t total_photons(std::size_t idx) const;

  /// Unit vector on one occupation basis state.
  Eigen::VectorXcd basis_state(const Occupation& occ) const;

 private:
  std::uint32_t modes_;
  std::uint32_t cutoff_;
  std::vector<Occupation> basis_;
  std::unordered_map<std::uint64_t, std::size_t> index_;  // FNV key -> index

  static std::uint64_t key_of(const Occupation& occ);
};

enum class PairKind : int { Z11 = 0, Z12 = 1, Z21 = 2, Z22 = 3 };

/// The pair-creation operator Z_11 = sum_i a_i^dag b_i^dag (and the three
/// siblings), truncated to the space: entries that would exceed the photon
/// cap are dropped, so callers must size the cutoff at >= 2 K_max.
SparseOperator build_Z(const FockSpace& space, PairKind which, std::uint32_t n);

/// Z11^i Z12^j Z21^k Z22^l |0>, by repeated application of build_Z operators.
Eigen::VectorXcd monomial_vector(const FockSpace& space, const subspace::MonomialIndex& idx,
                                 std::uint32_t n);

/// Pairwise inner products of the monomial vectors with |a| <= K, in BasisSet
/// order. Brute force; the validation target for the series Gram route.
Eigen::MatrixXcd gram_oracle(std::uint32_t n, std::uint32_t K);

/// Truncated expansion of |Lambda, n> on the dense space. `tail` is the
/// photon-number mass beyond the cutoff, 1 - |v|^2. Throws tail-too-large
/// when it exceeds max_tail.
struct TruncatedCoherent {
  Eigen::VectorXcd v;
  double tail = 0.0;
};
TruncatedCoherent coherent_truncated(const FockSpace& space, const coherent::LambdaMatrix& L,
                                     std::uint32_t n, double max_tail = 1e-8);

/// <Lambda1, n | Lambda2, n> truncated at a global photon cutoff, computed in
/// the occupation basis: single-factor states are expanded exactly, and the
/// n-fold tensor power reduces to a per-degree convolution of factor
/// overlaps. Independent of the closed-form overlap route.
Complex truncated_overlap(const coherent::LambdaMatrix& L1, const coherent::LambdaMatrix& L2,
                          std::uint32_t n, std::uint32_t max_total_photons);

/// Per-degree photon masses of the truncated |Lambda, n>: entry d is the
/// weight of the 2d-photon block, for d <= max_pairs.
std::vector<double> truncated_block_masses(const coherent::LambdaMatrix& L, std::uint32_t n,
                                           std::uint32_t max_pairs);

/// Eigenvalue of the heterodyne exceedance operator (the integral of n-mode
/// coherent projectors over total amplitude >= n d) on any Fock state with
/// m_total photons: Q(m_total + n, n d). The exceedance region is
/// phase-invariant mode by mode, so the operator is diagonal, with
/// |<m|alpha>|^2 weights giving Gamma(m_i + 1, 1) laws whose sum is
/// Gamma(m_total + n, 1).
double heterodyne_tail_eigenvalue(std::uint64_t m_total, std::uint64_t n, double d);

/// The projector onto Fock states with more than n d photons is dominated by
/// twice the heterodyne exceedance operator. Both are diagonal with
/// eigenvalues depending only on the total photon number M, so it suffices
/// that 2 Q(M+n, nd) >= 1 for every M > nd.
struct CutoffDominationReport {
  double min_margin = 0.0;   // min over checked M of 2 Q(M+n, nd) - 1
  std::uint64_t argmin_M = 0;
  std::uint64_t checked = 0;
  bool all_positive = false;
};
CutoffDominationReport verify_cutoff_domination(std::uint64_t n, double d, std::uint64_t M_max);

/// Max over Haar-random u of || W_u v - v || for the monomial vector of idx,
/// where W_u lifts the single-particle unitary u + ubar + ubar + u on
/// (a, b, a', b') to the truncated Fock space.
double invariance_check(std::uint32_t n, const subspace::MonomialIndex& idx,
                        std::uint32_t trials, Rng& rng);

/// The lifted W_u applied to an arbitrary vector (exposed for negative
/// controls). `u` is the n x n single-particle matrix on the a-modes.
Eigen::VectorXcd apply_W(const FockSpace& space, const Eigen::MatrixXcd& u,
                         const Eigen::VectorXcd& v);

/// Haar unitary on U(dim) via QR with phase correction.
Eigen::MatrixXcd haar_unitary(int dim, Rng& rng);

}  // namespace gdf::fock
