#include "gdf/fock_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "gdf/bounds.hpp"

namespace gdf::fock {

namespace {

// Factorials up to the photon caps in play (cutoffs <= ~120).
double sqrt_factorial(std::uint32_t m) {
  return std::exp(0.5 * std::lgamma(static_cast<double>(m) + 1.0));
}

// Single-factor (n = 1) expansion of |Lambda, 1> truncated at max_pairs pair
// excitations, keyed by the packed 4-mode occupation. Exact amplitudes:
// monomial (i,j,k,l) lands on occupation (i+j, i+k, j+l, k+l) with weight
// sqrt(prod m!) * l11^i l12^j l21^k l22^l / (i! j! k! l!), times det^{1/2}.
struct FactorState {
  // packed occupation (4 x 8 bits) -> amplitude
  std::unordered_map<std::uint32_t, Complex> amps;
  std::uint32_t max_pairs;
};

std::uint32_t pack4(std::uint32_t ma, std::uint32_t mb, std::uint32_t map,
                    std::uint32_t mbp) {
  return ma | (mb << 8) | (map << 16) | (mbp << 24);
}

FactorState factor_state(const coherent::LambdaMatrix& L, std::uint32_t max_pairs) {
  FactorState st;
  st.max_pairs = max_pairs;
  const subspace::BasisSet basis(max_pairs);
  const auto coeffs = coherent::coherent_coeffs(L, 1, basis);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& m = basis[a];
    const std::uint32_t occ[4] = {m.i + m.j, m.i + m.k, m.j + m.l, m.k + m.l};
    const double w =
        sqrt_factorial(occ[0]) * sqrt_factorial(occ[1]) * sqrt_factorial(occ[2]) *
        sqrt_factorial(occ[3]);
    st.amps[pack4(occ[0], occ[1], occ[2], occ[3])] += coeffs[a] * w;
  }
  return st;
}

std::uint32_t pairs_of_packed(std::uint32_t key) {
  const std::uint32_t total =
      (key & 0xff) + ((key >> 8) & 0xff) + ((key >> 16) & 0xff) + ((key >> 24) & 0xff);
  return total / 2;
}

// Per-degree self/cross inner products of factor states.
std::vector<Complex> factor_degree_overlaps(const FactorState& s1, const FactorState& s2) {
  std::vector<Complex> h(std::max(s1.max_pairs, s2.max_pairs) + 1, Complex(0.0, 0.0));
  for (const auto& [key, a1] : s1.amps) {
    const auto it = s2.amps.find(key);
    if (it == s2.amps.end()) continue;
    h[pairs_of_packed(key)] += std::conj(a1) * it->second;
  }
  return h;
}

std::vector<Complex> convolve_truncated(const std::vector<Complex>& a,
                                        const std::vector<Complex>& b,
                                        std::size_t max_deg) {
  std::vector<Complex> out(std::min(max_deg + 1, a.size() + b.size() - 1),
                           Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.size() && i < out.size(); ++i) {
    if (a[i] == Complex(0.0, 0.0)) continue;
    const std::size_t jmax = std::min(b.size(), out.size() - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<Complex> power_convolve(const std::vector<Complex>& h, std::uint32_t n,
                                    std::size_t max_deg) {
  std::vector<Complex> acc(1, Complex(1.0, 0.0));
  for (std::uint32_t f = 0; f < n; ++f) acc = convolve_truncated(acc, h, max_deg);
  return acc;
}

}  // namespace

double FockSpace::dimension_estimate(std::uint32_t mode_count, std::uint32_t max_total) {
  // C(modes + cutoff, modes)
  return std::exp(log_binomial(mode_count + max_total, mode_count));
}

std::uint64_t FockSpace::key_of(const Occupation& occ) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t m : occ) {
    h ^= m;
    h *= 1099511628211ULL;
  }
  return h;
}

FockSpace::FockSpace(std::uint32_t mode_count, std::uint32_t max_total_photons)
    : modes_(mode_count), cutoff_(max_total_photons) {
  require(mode_count >= 1, "domain", "FockSpace requires at least one mode");
  const double est = dimension_estimate(mode_count, max_total_photons);
  require(est <= static_cast<double>(kMaxDimension), "resource-guard",
          "truncated Fock dimension estimate " + std::to_string(est) +
              " exceeds the oracle limit " + std::to_string(kMaxDimension));
  // Graded-lex enumeration: all occupations with each total, totals ascending.
  Occupation occ(modes_, 0);
  for (std::uint32_t total = 0; total <= cutoff_; ++total) {
    // Enumerate compositions of `total` into modes_ parts, lexicographically.
    std::fill(occ.begin(), occ.end(), 0);
    occ[modes_ - 1] = static_cast<std::uint8_t>(total);
    for (;;) {
      basis_.push_back(occ);
      // next composition in lex order on the tuple
      std::int32_t pos = static_cast<std::int32_t>(modes_) - 1;
      while (pos > 0 && occ[pos] == 0) --pos;
      if (pos == 0) break;  // all mass at front: last composition
      const std::uint8_t tail = occ[pos];
      occ[pos] = 0;
      ++occ[pos - 1];
      occ[modes_ - 1] = static_cast<std::uint8_t>(tail - 1);
      if (pos == static_cast<std::int32_t>(modes_) - 1) occ[modes_ - 1] += 0;
    }
  }
  index_.reserve(basis_.size() * 2);
  for (std::size_t i = 0; i < basis_.size(); ++i) index_[key_of(basis_[i])] = i;
  require(index_.size() == basis_.size(), "internal", "occupation hash collision");
}

std::size_t FockSpace::index_of(const Occupation& occ) const {
  const auto it = index_.find(key_of(occ));
  require(it != index_.end(), "domain", "occupation not in this FockSpace");
  return it->second;
}

std::uint32_t FockSpace::total_photons(std::size_t idx) const {
  std::uint32_t t = 0;
  for (std::uint8_t m : basis_[idx]) t += m;
  return t;
}

Eigen::VectorXcd FockSpace::basis_state(const Occupation& occ) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size()));
  v(static_cast<Eigen::Index>(index_of(occ))) = Complex(1.0, 0.0);
  return v;
}

SparseOperator build_Z(const FockSpace& space, PairKind which, std::uint32_t n) {
  require(space.mode_count() == 4 * n, "dimension-mismatch",
          "build_Z requires a 4n-mode space");
  require(space.max_total_photons() >= 2, "domain", "build_Z requires cutoff >= 2");
  // Mode blocks: a = [0, n), b = [n, 2n), a' = [2n, 3n), b' = [3n, 4n).
  std::uint32_t off_p = 0, off_q = 0;
  switch (which) {
    case PairKind::Z11: off_p = 0, off_q = n; break;       // a^dag b^dag
    case PairKind::Z12: off_p = 0, off_q = 2 * n; break;   // a^dag a'^dag
    case PairKind::Z21: off_p = n, off_q = 3 * n; break;   // b^dag b'^dag
    case PairKind::Z22: off_p = 2 * n, off_q = 3 * n; break;  // a'^dag b'^dag
  }
  std::vector<Eigen::Triplet<Complex>> trips;
  const std::size_t dim = space.size();
  for (std::size_t col = 0; col < dim; ++col) {
    if (space.total_photons(col) + 2 > space.max_total_photons()) continue;
    Occupation occ = space.occupation(col);
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t p = off_p + i;
      const std::uint32_t q = off_q + i;
      const double amp = std::sqrt((occ[p] + 1.0) * (occ[q] + 1.0));
      ++occ[p];
      ++occ[q];
      trips.emplace_back(static_cast<int>(space.index_of(occ)), static_cast<int>(col),
                         Complex(amp, 0.0));
      --occ[p];
      --occ[q];
    }
  }
  SparseOperator Z(static_cast<int>(dim), static_cast<int>(dim));
  Z.setFromTriplets(trips.begin(), trips.end());
  return Z;
}

Eigen::VectorXcd monomial_vector(const FockSpace& space, const subspace::MonomialIndex& idx,
                                 std::uint32_t n) {
  require(2 * idx.total() <= space.max_total_photons(), "domain",
          "monomial degree exceeds the photon cutoff");
  Eigen::VectorXcd v =
      space.basis_state(Occupation(space.mode_count(), 0));
  const PairKind kinds[4] = {PairKind::Z11, PairKind::Z12, PairKind::Z21, PairKind::Z22};
  const std::uint32_t reps[4] = {idx.i, idx.j, idx.k, idx.l};
  for (int e = 0; e < 4; ++e) {
    if (reps[e] == 0) continue;
    const SparseOperator Z = build_Z(space, kinds[e], n);
    for (std::uint32_t r = 0; r < reps[e]; ++r) v = Z * v;
  }
  return v;
}

Eigen::MatrixXcd gram_oracle(std::uint32_t n, std::uint32_t K) {
  const FockSpace space(4 * n, 2 * K);  // monomials carry exactly 2d photons
  const subspace::BasisSet basis(K);
  const SparseOperator Z[4] = {
      build_Z(space, PairKind::Z11, n), build_Z(space, PairKind::Z12, n),
      build_Z(space, PairKind::Z21, n), build_Z(space, PairKind::Z22, n)};
  // Build every monomial vector by extending a lower-degree parent.
  std::vector<Eigen::VectorXcd> vecs(basis.size());
  vecs[0] = space.basis_state(Occupation(space.mode_count(), 0));
  for (std::size_t a = 1; a < basis.size(); ++a) {
    subspace::MonomialIndex parent = basis[a];
    int step = 0;
    if (parent.i > 0) {
      --parent.i;
      step = 0;
    } else if (parent.j > 0) {
      --parent.j;
      step = 1;
    } else if (parent.k > 0) {
      --parent.k;
      step = 2;
    } else {
      --parent.l;
      step = 3;
    }
    vecs[a] = Z[step] * vecs[basis.index_of(parent)];
  }
  Eigen::MatrixXcd G(basis.size(), basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = a; b < basis.size(); ++b) {
      const Complex g = vecs[a].dot(vecs[b]);  // conjugates the first argument
      G(a, b) = g;
      G(b, a) = std::conj(g);
    }
  return G;
}

TruncatedCoherent coherent_truncated(const FockSpace& space, const coherent::LambdaMatrix& L,
                                     std::uint32_t n, double max_tail) {
  require(space.mode_count() == 4 * n, "dimension-mismatch",
          "coherent_truncated requires a 4n-mode space");
  const std::uint32_t max_pairs = space.max_total_photons() / 2;
  const FactorState f = factor_state(L, max_pairs);

  TruncatedCoherent out;
  out.v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.size()));
  // Tensor the n factor expansions, pruning at the global photon cap.
  struct Partial {
    Occupation occ;
    Complex amp;
    std::uint32_t photons;
  };
  std::vector<Partial> frontier{{Occupation(space.mode_count(), 0), Complex(1.0, 0.0), 0}};
  for (std::uint32_t blk = 0; blk < n; ++blk) {
    std::vector<Partial> next;
    next.reserve(frontier.size() * f.amps.size() / 2 + 1);
    for (const auto& part : frontier) {
      for (const auto& [key, amp] : f.amps) {
        const std::uint32_t add = 2 * pairs_of_packed(key);
        if (part.photons + add > space.max_total_photons()) continue;
        Partial p = part;
        p.occ[blk] = static_cast<std::uint8_t>(key & 0xff);
        p.occ[n + blk] = static_cast<std::uint8_t>((key >> 8) & 0xff);
        p.occ[2 * n + blk] = static_cast<std::uint8_t>((key >> 16) & 0xff);
        p.occ[3 * n + blk] = static_cast<std::uint8_t>((key >> 24) & 0xff);
        p.amp *= amp;
        p.photons += add;
        next.push_back(std::move(p));
      }
    }
    frontier = std::move(next);
  }
  for (const auto& part : frontier)
    out.v(static_cast<Eigen::Index>(space.index_of(part.occ))) += part.amp;
  out.tail = std::max(0.0, 1.0 - out.v.squaredNorm());
  require(out.tail < max_tail, "tail-too-large",
          "truncation tail " + std::to_string(out.tail) + " exceeds " +
              std::to_string(max_tail));
  return out;
}

Complex truncated_overlap(const coherent::LambdaMatrix& L1, const coherent::LambdaMatrix& L2,
                          std::uint32_t n, std::uint32_t max_total_photons) {
  const std::uint32_t max_pairs = max_total_photons / 2;
  const FactorState f1 = factor_state(L1, max_pairs);
  const FactorState f2 = factor_state(L2, max_pairs);
  const std::vector<Complex> h = factor_degree_overlaps(f1, f2);
  const std::vector<Complex> conv = power_convolve(h, n, max_pairs);
  Complex total(0.0, 0.0);
  for (const Complex& c : conv) total += c;
  return total;
}

std::vector<double> truncated_block_masses(const coherent::LambdaMatrix& L, std::uint32_t n,
                                           std::uint32_t max_pairs) {
  const FactorState f = factor_state(L, max_pairs);
  const std::vector<Complex> h = factor_degree_overlaps(f, f);
  const std::vector<Complex> conv = power_convolve(h, n, max_pairs);
  std::vector<double> out(conv.size());
  for (std::size_t d = 0; d < conv.size(); ++d) out[d] = conv[d].real();
  return out;
}

double heterodyne_tail_eigenvalue(std::uint64_t m_total, std::uint64_t n, double d) {
  require(n >= 1, "domain", "heterodyne_tail_eigenvalue requires n >= 1");
  require(d >= 0.0, "domain", "heterodyne_tail_eigenvalue requires d >= 0");
  if (d == 0.0) return 1.0;
  return incomplete_gamma_Q(static_cast<double>(m_total + n),
                            static_cast<double>(n) * d);
}

CutoffDominationReport verify_cutoff_domination(std::uint64_t n, double d, std::uint64_t M_max) {
  CutoffDominationReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n) * d;
  std::uint64_t M0 = static_cast<std::uint64_t>(std::floor(nd)) + 1;
  for (std::uint64_t M = M0; M <= M_max; ++M) {
    const double margin = 2.0 * heterodyne_tail_eigenvalue(M, n, d) - 1.0;
    ++rep.checked;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_M = M;
    }
  }
  rep.all_positive = rep.checked > 0 && rep.min_margin > 0.0;
  return rep;
}

Eigen::MatrixXcd haar_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const Complex dd = r(c, c);
    q.col(c) *= std::abs(dd) > 0.0 ? dd / std::abs(dd) : Complex(1.0, 0.0);
  }
  return q;
}

Eigen::VectorXcd apply_W(const FockSpace& space, const Eigen::MatrixXcd& u,
                         const Eigen::VectorXcd& v) {
  const std::uint32_t n = space.mode_count() / 4;
  require(u.rows() == n && u.cols() == n, "dimension-mismatch",
          "apply_W expects an n x n single-particle unitary");
  // Single-particle action on annihilation operators: u on a, ubar on b,
  // ubar on a', u on b'. Creation operators therefore transform with the
  // conjugate block.
  Eigen::MatrixXcd B(space.mode_count(), space.mode_count());
  B.setZero();
  B.block(0, 0, n, n) = u.conjugate();          // a^dag
  B.block(n, n, n, n) = u;                      // b^dag
  B.block(2 * n, 2 * n, n, n) = u;              // a'^dag
  B.block(3 * n, 3 * n, n, n) = u.conjugate();  // b'^dag

  const Eigen::Index dim = static_cast<Eigen::Index>(space.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  Eigen::VectorXcd cur(dim), next(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (v(s) == Complex(0.0, 0.0)) continue;
    const Occupation& occ = space.occupation(static_cast<std::size_t>(s));
    // Rebuild the basis monomial with transformed creation operators.
    cur.setZero();
    cur(static_cast<Eigen::Index>(space.index_of(Occupation(space.mode_count(), 0)))) =
        Complex(1.0, 0.0);
    double norm = 1.0;
    for (std::uint32_t mode = 0; mode < space.mode_count(); ++mode) {
      for (std::uint8_t rep = 0; rep < occ[mode]; ++rep) {
        next.setZero();
        for (Eigen::Index t = 0; t < dim; ++t) {
          if (cur(t) == Complex(0.0, 0.0)) continue;
          Occupation o = space.occupation(static_cast<std::size_t>(t));
          std::uint32_t tot = space.total_photons(static_cast<std::size_t>(t));
          if (tot + 1 > space.max_total_photons()) continue;
          for (std::uint32_t j = 0; j < space.mode_count(); ++j) {
            const Complex coef = B(mode, j);
            if (coef == Complex(0.0, 0.0)) continue;
            ++o[j];
            next(static_cast<Eigen::Index>(space.index_of(o))) +=
                coef * cur(t) * std::sqrt(o[j]);
            --o[j];
          }
        }
        cur.swap(next);
        norm *= rep + 1.0;
      }
    }
    out += (v(s) / std::sqrt(norm)) * cur;
  }
  return out;
}

double invariance_check(std::uint32_t n, const subspace::MonomialIndex& idx,
                        std::uint32_t trials, Rng& rng) {
  require(n >= 1 && n <= 3, "resource-guard", "invariance_check supports n <= 3");
  const FockSpace space(4 * n, 2 * idx.total());
  Eigen::VectorXcd v = monomial_vector(space, idx, n);
  const double nrm = v.norm();
  if (nrm > 0.0) v /= nrm;
  double max_dev = 0.0;
  for (std::uint32_t t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd u = haar_unitary(static_cast<int>(n), rng);
    const Eigen::VectorXcd w = apply_W(space, u, v);
    max_dev = std::max(max_dev, (w - v).norm());
  }
  return max_dev;
}

}  // namespace gdf::fock
