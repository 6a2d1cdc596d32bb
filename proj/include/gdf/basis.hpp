#pragma once

#include <cstdint>
#include <vector>

#include "gdf/errors.hpp"

namespace gdf::subspace {

/// Exponents (i, j, k, l) of the monomial vector Z11^i Z12^j Z21^k Z22^l |0>.
struct MonomialIndex {
  std::uint32_t i = 0, j = 0, k = 0, l = 0;

  std::uint32_t total() const { return i + j + k + l; }
  friend bool operator==(const MonomialIndex&, const MonomialIndex&) = default;
};

/// dim V_{=K} = C(K+3, 3): quadruples summing to exactly K.
std::uint64_t dim_V_eq(std::uint64_t K);

/// dim V_{<=K} = C(K+4, 4).
std::uint64_t dim_V_leq(std::uint64_t K);

/// log2 of dim V_{<=K}; usable far beyond the exact-count overflow point.
double log2_dim_V_leq(std::uint64_t K);

/// Ordered enumeration of all monomial indices with total degree <= K.
/// Graded lexicographic: ascending total degree, then ascending lex on
/// (i, j, k, l). Photon-number blocks are contiguous by construction.
class BasisSet {
 public:
  explicit BasisSet(std::uint32_t K);

  std::uint32_t cutoff() const { return K_; }
  std::size_t size() const { return indices_.size(); }
  const MonomialIndex& operator[](std::size_t a) const { return indices_[a]; }
  const std::vector<MonomialIndex>& indices() const { return indices_; }

  /// First basis position of the degree-d block.
  std::size_t degree_offset(std::uint32_t d) const { return offsets_.at(d); }
  std::size_t degree_size(std::uint32_t d) const {
    return offsets_.at(d + 1) - offsets_.at(d);
  }

  std::size_t index_of(const MonomialIndex& m) const;

 private:
  std::uint32_t K_;
  std::vector<MonomialIndex> indices_;
  std::vector<std::size_t> offsets_;  // K_+2 entries, degree block boundaries
};

}  // namespace gdf::subspace
