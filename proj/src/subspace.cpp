#include "gdf/subspace.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "gdf/bounds.hpp"
#include "gdf/rng.hpp"

namespace gdf::subspace {

// ---------------------------------------------------------------------------
// Basis enumeration and dimensions

namespace {

std::uint64_t checked_binom_small(std::uint64_t K, int order) {
  // C(K + order, order) for order in {3, 4}, exact with overflow detection.
  unsigned __int128 acc = 1;
  for (int t = 1; t <= order; ++t) acc *= K + t;
  for (int t = 2; t <= order; ++t) acc /= t;
  require(acc <= static_cast<unsigned __int128>(UINT64_MAX), "domain",
          "subspace dimension exceeds the count type");
  return static_cast<std::uint64_t>(acc);
}

}  // namespace

std::uint64_t dim_V_eq(std::uint64_t K) { return checked_binom_small(K, 3); }

std::uint64_t dim_V_leq(std::uint64_t K) { return checked_binom_small(K, 4); }

double log2_dim_V_leq(std::uint64_t K) {
  return log_binomial(K + 4, 4) / 0.6931471805599453;
}

BasisSet::BasisSet(std::uint32_t K) : K_(K) {
  indices_.reserve(dim_V_leq(K));
  offsets_.assign(K + 2, 0);
  for (std::uint32_t d = 0; d <= K; ++d) {
    offsets_[d] = indices_.size();
    for (std::uint32_t i = 0; i <= d; ++i)
      for (std::uint32_t j = 0; j <= d - i; ++j)
        for (std::uint32_t k = 0; k <= d - i - j; ++k)
          indices_.push_back(MonomialIndex{i, j, k, d - i - j - k});
  }
  offsets_[K + 1] = indices_.size();
}

std::size_t BasisSet::index_of(const MonomialIndex& m) const {
  const std::uint32_t d = m.total();
  require(d <= K_, "domain", "monomial degree exceeds the basis cutoff");
  for (std::size_t a = offsets_[d]; a < offsets_[d + 1]; ++a)
    if (indices_[a] == m) return a;
  fail("internal", "monomial not found in basis");
}

// ---------------------------------------------------------------------------
// Series Gram matrix

namespace {

// Polynomial in the 8 formal variables (lbar_11..lbar_22, lprime_11..lprime_22),
// keyed by packed exponents (8 x 8 bits).
template <typename Coef>
using Poly = std::unordered_map<std::uint64_t, Coef>;

std::uint64_t poly_key(const MonomialIndex& bar, const MonomialIndex& prime) {
  return static_cast<std::uint64_t>(bar.i) | (static_cast<std::uint64_t>(bar.j) << 8) |
         (static_cast<std::uint64_t>(bar.k) << 16) |
         (static_cast<std::uint64_t>(bar.l) << 24) |
         (static_cast<std::uint64_t>(prime.i) << 32) |
         (static_cast<std::uint64_t>(prime.j) << 40) |
         (static_cast<std::uint64_t>(prime.k) << 48) |
         (static_cast<std::uint64_t>(prime.l) << 56);
}

std::uint32_t key_bar_degree(std::uint64_t key) {
  return static_cast<std::uint32_t>((key & 0xff) + ((key >> 8) & 0xff) +
                                    ((key >> 16) & 0xff) + ((key >> 24) & 0xff));
}

std::uint32_t key_prime_degree(std::uint64_t key) {
  return static_cast<std::uint32_t>(((key >> 32) & 0xff) + ((key >> 40) & 0xff) +
                                    ((key >> 48) & 0xff) + ((key >> 56) & 0xff));
}

// Q = tr(W) - det(W) for W = Lambda^dag Lambda': the 8-term integer polynomial
// with det(1 - W) = 1 - Q.
template <typename Coef>
Poly<Coef> q_polynomial() {
  Poly<Coef> q;
  // tr(W) = sum_{a,b} lbar_ab lprime_ab
  const MonomialIndex e[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (int t = 0; t < 4; ++t) q[poly_key(e[t], e[t])] += Coef(1);
  // det(W) = det(Lambda)^bar det(Lambda') = (lbar11 lbar22 - lbar12 lbar21)(...)
  const MonomialIndex d1{1, 0, 0, 1};  // lbar11 lbar22
  const MonomialIndex d2{0, 1, 1, 0};  // lbar12 lbar21
  q[poly_key(d1, d1)] -= Coef(1);
  q[poly_key(d1, d2)] += Coef(1);
  q[poly_key(d2, d1)] += Coef(1);
  q[poly_key(d2, d2)] -= Coef(1);
  return q;
}

template <typename Coef>
Poly<Coef> poly_multiply_truncated(const Poly<Coef>& a, const Poly<Coef>& b,
                                   std::uint32_t max_deg) {
  Poly<Coef> out;
  out.reserve(a.size() * 2);
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      const std::uint64_t k = ka + kb;  // per-byte exponent addition, no carries for K <= 127
      if (key_bar_degree(k) > max_deg || key_prime_degree(k) > max_deg) continue;
      out[k] += ca * cb;
    }
  }
  return out;
}

// C(n+j-1, j) built multiplicatively; each intermediate product is itself a
// binomial, so the integer division is exact.
template <typename Coef>
Coef rising_binomial(std::uint64_t n, std::uint32_t j) {
  Coef acc(1);
  for (std::uint64_t t = 1; t <= j; ++t) {
    acc = acc * Coef(n + t - 1);
    acc = acc / Coef(t);
  }
  return acc;
}

template <typename Coef>
Eigen::MatrixXd gram_from_series(std::uint64_t n, std::uint32_t K, const BasisSet& basis) {
  // det(1 - W)^{-n} = sum_j C(n+j-1, j) Q^j; Q has minimum bidegree (1,1),
  // so j <= K suffices for the (d, d) blocks with d <= K.
  Poly<Coef> series;
  series[0] = Coef(1);
  const Poly<Coef> q = q_polynomial<Coef>();
  Poly<Coef> q_power = q;
  for (std::uint32_t j = 1; j <= K; ++j) {
    const Coef binom = rising_binomial<Coef>(n, j);
    for (const auto& [k, c] : q_power) series[k] += binom * c;
    if (j < K) q_power = poly_multiply_truncated(q_power, q, K);
  }

  std::vector<double> fact(K + 1, 1.0);
  for (std::uint32_t t = 1; t <= K; ++t) fact[t] = fact[t - 1] * t;
  auto factorials = [&](const MonomialIndex& m) {
    return fact[m.i] * fact[m.j] * fact[m.k] * fact[m.l];
  };

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = a; b < basis.size(); ++b) {
      if (basis[a].total() != basis[b].total()) continue;  // photon superselection
      const auto it = series.find(poly_key(basis[a], basis[b]));
      if (it == series.end()) continue;
      const double g =
          factorials(basis[a]) * factorials(basis[b]) * static_cast<double>(it->second);
      G(a, b) = g;
      G(b, a) = g;
    }
  }
  return G;
}

// Thin 128-bit integer for the exact series path.
struct Int128 {
  __int128 v = 0;
  Int128() = default;
  explicit Int128(std::uint64_t x) : v(static_cast<__int128>(x)) {}
  explicit Int128(int x) : v(x) {}
  Int128& operator+=(const Int128& o) {
    v += o.v;
    return *this;
  }
  Int128& operator-=(const Int128& o) {
    v -= o.v;
    return *this;
  }
  Int128 operator*(const Int128& o) const {
    Int128 r;
    r.v = v * o.v;
    return r;
  }
  Int128 operator/(const Int128& o) const {
    Int128 r;
    r.v = v / o.v;
    return r;
  }
  explicit operator double() const { return static_cast<double>(v); }
};

}  // namespace

Eigen::MatrixXd gram_matrix(std::uint64_t n, std::uint32_t K) {
  require(n >= 1, "domain", "gram_matrix requires n >= 1");
  require(K <= 100, "domain", "gram_matrix supports K <= 100");
  const BasisSet basis(K);
  // Exact 128-bit path while the coefficients stay comfortably in range.
  if (K <= 8 && n <= 10000) return gram_from_series<Int128>(n, K, basis);
  return gram_from_series<double>(n, K, basis);
}

// ---------------------------------------------------------------------------
// Monte-Carlo operator integration

double vacuum_weight_normalization(std::uint64_t n, double eta) {
  require(n >= 6, "domain", "vacuum_weight_normalization requires n >= 6");
  require(eta > 0.0 && eta <= 1.0, "domain", "eta must lie in (0, 1]");
  // A_j = int_0^eta x^j (1-x)^{n-4} dx = B(j+1, n-3) I_eta(j+1, n-3)
  const double dn = static_cast<double>(n);
  double A[3];
  for (int j = 0; j < 3; ++j) {
    const double log_beta = std::lgamma(j + 1.0) + std::lgamma(dn - 3.0) -
                            std::lgamma(dn - 2.0 + j);
    const double I =
        eta >= 1.0 ? 1.0
                   : 1.0 - reg_beta_tail_exact(eta, j + 1, n - 3).value();
    A[j] = std::exp(log_beta) * I;
  }
  const double pref = (dn - 1.0) * (dn - 2.0) * (dn - 2.0) * (dn - 3.0);
  return pref * (A[2] * A[0] - A[1] * A[1]);
}

namespace {

// Radial sampler for the vacuum-weighted density on [0, eta]^2, proportional
// to (x-y)^2 (1-x)^{n-4} (1-y)^{n-4}. Coordinate proposal (1-t)^{n-4} has a
// closed-form inverse CDF; acceptance ratio (x-y)^2 / eta^2.
coherent::SingularPair sample_vacuum_weighted(double eta, std::uint64_t n, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double p = static_cast<double>(n) - 3.0;  // exponent + 1
  const double mass = 1.0 - std::pow(1.0 - eta, p);
  const double inv_eta2 = 1.0 / (eta * eta);
  for (;;) {
    const double x = 1.0 - std::pow(1.0 - unif(rng) * mass, 1.0 / p);
    const double y = 1.0 - std::pow(1.0 - unif(rng) * mass, 1.0 / p);
    if (unif(rng) < (x - y) * (x - y) * inv_eta2) {
      coherent::SingularPair out;
      out.x = std::max(x, y);
      out.y = std::min(x, y);
      return out;
    }
  }
}

// Symmetry class of a monomial under the diagonal-phase subgroup of the
// polar unitaries: applying diag(e^{i p1}, e^{i p2}) on the left and
// diag(e^{i q1}, e^{i q2}) on the right multiplies c_a by a phase determined
// by (i+j, k+l) and (i+k, j+l). Averaged over Haar u, v, the coefficient
// cross-moments E[c_a conj(c_b)] therefore vanish unless a and b share total
// degree, row weight and column weight; the estimator zeroes those entries
// exactly (a conditional expectation, unbiased and variance-reducing).
std::uint32_t torus_class(const MonomialIndex& m) {
  return (m.total() << 16) | ((m.i + m.j) << 8) | (m.i + m.k);
}

void project_torus_classes(const BasisSet& basis, Eigen::MatrixXcd& C) {
  const std::size_t dim = basis.size();
  std::vector<std::uint32_t> cls(dim);
  for (std::size_t a = 0; a < dim; ++a) cls[a] = torus_class(basis[a]);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if (cls[a] != cls[b]) C(a, b) = Complex(0.0, 0.0);
}

struct BatchPlan {
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 0;
};

BatchPlan plan_batches(std::uint64_t samples, std::size_t batches) {
  BatchPlan plan;
  plan.sizes.assign(batches, samples / batches);
  for (std::size_t b = 0; b < samples % batches; ++b) ++plan.sizes[b];
  plan.total = samples;
  return plan;
}

}  // namespace

GramOperatorPair operator_matrix_P_eta(std::uint64_t n, std::uint32_t K, double eta,
                                       std::uint64_t samples, std::uint64_t seed,
                                       Sampling strategy, unsigned threads) {
  require(n >= 6, "domain", "operator_matrix_P_eta requires n >= 6");
  require(eta > 0.0 && eta < 1.0, "domain", "operator_matrix_P_eta requires eta in (0, 1)");
  require(K >= 1, "domain", "operator_matrix_P_eta requires K >= 1");
  require(samples >= 100, "domain", "operator_matrix_P_eta requires >= 100 samples");

  constexpr std::size_t kBatches = 100;
  const BasisSet basis(K);
  const std::size_t dim = basis.size();
  const BatchPlan plan = plan_batches(samples, kBatches);
  const double scale_T = params::volume_T(n, eta);
  const double scale_Z = vacuum_weight_normalization(n, eta);

  std::vector<Eigen::MatrixXcd> batch_C(kBatches);
  auto run_batch = [&](std::size_t b) {
    Rng rng = substream(seed, b);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd c(dim);
    for (std::uint64_t s = 0; s < plan.sizes[b]; ++s) {
      coherent::LambdaMatrix L = [&] {
        if (strategy == Sampling::Direct) return coherent::sample_lambda(eta, n, rng);
        const coherent::SingularPair sp = sample_vacuum_weighted(eta, n, rng);
        Eigen::Matrix2cd sigma = Eigen::Matrix2cd::Zero();
        sigma(0, 0) = std::sqrt(sp.x);
        sigma(1, 1) = std::sqrt(sp.y);
        const Eigen::Matrix2cd u = coherent::haar_u2(rng);
        const Eigen::Matrix2cd v = coherent::haar_u2(rng);
        return coherent::LambdaMatrix(u * sigma * v.adjoint());
      }();
      const auto coeffs = strategy == Sampling::Direct
                              ? coherent::coherent_coeffs(L, n, basis)
                              : coherent::coherent_coeffs_unnormalized(L, basis);
      for (std::size_t a = 0; a < dim; ++a) c(a) = coeffs[a];
      acc.selfadjointView<Eigen::Lower>().rankUpdate(c, 1.0);
    }
    const double scale = (strategy == Sampling::Direct ? scale_T : scale_Z) /
                         static_cast<double>(plan.sizes[b]);
    batch_C[b] = acc.selfadjointView<Eigen::Lower>();
    batch_C[b] *= scale;
    project_torus_classes(basis, batch_C[b]);
  };

  unsigned nthreads = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (nthreads == 0) nthreads = 1;
  nthreads = std::min<unsigned>(nthreads, kBatches);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nthreads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= kBatches) return;
        run_batch(b);
      }
    });
  for (auto& t : pool) t.join();

  // Fixed-order pairwise reduction of the sample-weighted batch means.
  std::vector<Eigen::MatrixXcd> level;
  level.reserve(kBatches);
  for (std::size_t b = 0; b < kBatches; ++b)
    level.push_back(batch_C[b] *
                    (static_cast<double>(plan.sizes[b]) / static_cast<double>(plan.total)));
  while (level.size() > 1) {
    std::vector<Eigen::MatrixXcd> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) up.push_back(level.back());
    level = std::move(up);
  }
  const Eigen::MatrixXcd C_hat = level.front();

  GramOperatorPair out;
  out.G = gram_matrix(n, K);
  out.M = out.G * C_hat * out.G;
  out.batch_C = std::move(batch_C);
  out.batch_samples = plan.sizes;
  out.n = n;
  out.K = K;
  out.eta = eta;
  out.sample_count = samples;
  out.strategy = strategy;

  // Weighted batch variance of the mean: with B near-equal batches,
  // sum_b w_b (M_b - M)^2 / (B-1) is s^2/B for s the batch-mean spread.
  out.M_stderr = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t b = 0; b < kBatches; ++b) {
    const Eigen::MatrixXcd Mb = out.G * out.batch_C[b] * out.G;
    const double w = static_cast<double>(plan.sizes[b]) / static_cast<double>(plan.total);
    out.M_stderr += w * (Mb - out.M).cwiseAbs2();
  }
  out.M_stderr = (out.M_stderr / static_cast<double>(kBatches - 1)).cwiseSqrt();
  return out;
}

ExtremalEigs generalized_extremal_eigs(const Eigen::MatrixXcd& M, const Eigen::MatrixXd& G) {
  require(M.rows() == G.rows() && M.cols() == G.cols() && M.rows() == M.cols(),
          "dimension-mismatch", "M and G must be square of equal size");
  const Eigen::Index dim = G.rows();
  Eigen::VectorXd d(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    require(G(a, a) > 0.0, "ill-conditioned-gram", "Gram diagonal not positive");
    d(a) = 1.0 / std::sqrt(G(a, a));
  }
  const Eigen::MatrixXd Gt = d.asDiagonal() * G * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gt);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  require(lmin > 0.0 && lmax / lmin <= 1e12, "ill-conditioned-gram",
          "prescaled Gram condition number " +
              std::to_string(lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity()) +
              " exceeds 1e12");
  const Eigen::MatrixXd W =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();
  const Eigen::MatrixXcd Mt = d.asDiagonal() * M * d.asDiagonal();
  Eigen::MatrixXcd S = W * Mt * W;
  S = ((S + S.adjoint()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(S);
  ExtremalEigs out;
  out.gram_condition = lmax / lmin;
  out.lambda_min = es2.eigenvalues()(0);
  out.lambda_max = es2.eigenvalues()(dim - 1);
  out.vec_min = d.asDiagonal() * (W * es2.eigenvectors().col(0));
  out.vec_max = d.asDiagonal() * (W * es2.eigenvectors().col(dim - 1));
  return out;
}

DefinettiReport verify_definetti(std::uint64_t n, std::uint32_t K, double eta,
                                 std::uint64_t samples, std::uint64_t seed,
                                 Sampling strategy, unsigned threads) {
  require(n >= 6, "domain", "verify_definetti requires n >= 6");
  const params::DefinettiEpsilon eps = params::definetti_epsilon(n, K, eta);

  const GramOperatorPair pair =
      operator_matrix_P_eta(n, K, eta, samples, seed, strategy, threads);
  const std::size_t B = pair.batch_C.size();
  const std::size_t half = B / 2;

  auto weighted_mean = [&](std::size_t lo, std::size_t hi) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(pair.G.rows(), pair.G.cols());
    double wsum = 0.0;
    for (std::size_t b = lo; b < hi; ++b) {
      const double w = static_cast<double>(pair.batch_samples[b]);
      acc += w * pair.batch_C[b];
      wsum += w;
    }
    return Eigen::MatrixXcd((acc / wsum).eval());
  };

  // Locate the extremal directions on the first half of the batches, then
  // re-estimate their Rayleigh quotients with errors on the second half.
  const Eigen::MatrixXcd C_loc = weighted_mean(0, half);
  const ExtremalEigs eigs_loc =
      generalized_extremal_eigs(pair.G * C_loc * pair.G, pair.G);

  auto holdout = [&](const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd gv = pair.G * v;
    double mean = 0.0, wsum = 0.0;
    std::vector<double> s(B, 0.0);
    for (std::size_t b = half; b < B; ++b) {
      s[b] = (gv.adjoint() * pair.batch_C[b] * gv)(0, 0).real();
      const double w = static_cast<double>(pair.batch_samples[b]);
      mean += w * s[b];
      wsum += w;
    }
    mean /= wsum;
    // As in the entrywise case: weighted spread over (B - half - 1) is
    // already the squared standard error of the holdout mean.
    double var = 0.0;
    for (std::size_t b = half; b < B; ++b) {
      const double w = static_cast<double>(pair.batch_samples[b]) / wsum;
      var += w * (s[b] - mean) * (s[b] - mean);
    }
    var /= static_cast<double>(B - half - 1);
    return std::pair<double, double>(mean, std::sqrt(var));
  };

  const ExtremalEigs eigs_full = generalized_extremal_eigs(pair.M, pair.G);

  DefinettiReport rep;
  rep.n = n;
  rep.K = K;
  rep.eta = eta;
  rep.samples = samples;
  rep.seed = seed;
  rep.strategy = strategy;
  std::tie(rep.lambda_min, rep.stderr_min) = holdout(eigs_loc.vec_min);
  std::tie(rep.lambda_max, rep.stderr_max) = holdout(eigs_loc.vec_max);
  rep.lambda_min_full = eigs_full.lambda_min;
  rep.lambda_max_full = eigs_full.lambda_max;
  rep.gram_condition = eigs_full.gram_condition;
  rep.eps_bound = eps.value;
  rep.eps_vacuous = eps.vacuous;
  rep.verdict_upper = rep.lambda_max <= 1.0 + 3.0 * rep.stderr_max;
  rep.verdict_lower =
      !eps.vacuous &&
      rep.lambda_min >= 1.0 - eps.value.value() - 3.0 * rep.stderr_min;
  return rep;
}

double photon_block_via_gram(const coherent::LambdaMatrix& L, std::uint64_t n,
                             std::uint32_t K) {
  require(n >= 4, "domain", "photon_block_via_gram requires n >= 4");
  const BasisSet basis(K);
  const Eigen::MatrixXd G = gram_matrix(n, K);
  const auto coeffs = coherent::coherent_coeffs(L, n, basis);
  const std::size_t lo = basis.degree_offset(K);
  const std::size_t sz = basis.degree_size(K);
  Complex acc(0.0, 0.0);
  for (std::size_t a = 0; a < sz; ++a)
    for (std::size_t b = 0; b < sz; ++b)
      acc += std::conj(coeffs[lo + a]) * G(lo + a, lo + b) * coeffs[lo + b];
  return acc.real();
}

}  // namespace gdf::subspace
