#include "gdf/coherent.hpp"

#include <cmath>

#include "gdf/bounds.hpp"
#include "gdf/log_real.hpp"

namespace gdf::coherent {

namespace {

constexpr double kBoundaryTol = 1e-12;

SingularPair squares_of(const Eigen::Matrix2cd& m) {
  // Eigenvalues of the 2x2 Hermitian m m^dag from trace and determinant.
  const Eigen::Matrix2cd g = m * m.adjoint();
  const double tr = g.trace().real();
  const double det = std::max(0.0, std::norm(m.determinant()));
  double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) disc = 0.0;
  const double root = std::sqrt(disc);
  SingularPair out;
  out.x = 0.5 * (tr + root);
  out.y = std::max(0.0, 0.5 * (tr - root));
  return out;
}

}  // namespace

LambdaMatrix::LambdaMatrix(const Eigen::Matrix2cd& m) : m_(m) {
  require(squares_of(m_).x < 1.0 - kBoundaryTol, "domain",
          "LambdaMatrix requires spectral norm < 1");
}

LambdaMatrix::LambdaMatrix(Complex l11, Complex l12, Complex l21, Complex l22)
    : LambdaMatrix((Eigen::Matrix2cd() << l11, l12, l21, l22).finished()) {}

bool in_region(const LambdaMatrix& L, double eta) {
  require(eta >= 0.0 && eta <= 1.0, "domain", "in_region requires eta in [0, 1]");
  return singular_squares(L).x <= eta + kBoundaryTol;
}

SingularPair singular_squares(const LambdaMatrix& L) { return squares_of(L.matrix()); }

SvdFactors svd_factors(const LambdaMatrix& L) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(
      L.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors out;
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.squares.x = svd.singularValues()(0) * svd.singularValues()(0);
  out.squares.y = svd.singularValues()(1) * svd.singularValues()(1);
  return out;
}

double log_det_one_minus(const LambdaMatrix& L) {
  const SingularPair s = singular_squares(L);
  return std::log1p(-s.x) + std::log1p(-s.y);
}

double vacuum_overlap(const LambdaMatrix& L, std::uint64_t n) {
  return std::exp(0.5 * static_cast<double>(n) * log_det_one_minus(L));
}

namespace {

std::vector<Complex> expansion_coeffs(const LambdaMatrix& L,
                                      const subspace::BasisSet& basis,
                                      double scale) {
  const std::uint32_t K = basis.cutoff();
  const Eigen::Matrix2cd& m = L.matrix();
  // Power tables for the four entries.
  std::vector<std::vector<Complex>> pw(4, std::vector<Complex>(K + 1, Complex(1.0, 0.0)));
  const Complex entries[4] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
  for (int e = 0; e < 4; ++e)
    for (std::uint32_t p = 1; p <= K; ++p) pw[e][p] = pw[e][p - 1] * entries[e];
  std::vector<double> inv_fact(K + 1, 1.0);
  for (std::uint32_t p = 1; p <= K; ++p) inv_fact[p] = inv_fact[p - 1] / p;

  std::vector<Complex> out(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& idx = basis[a];
    out[a] = scale * pw[0][idx.i] * pw[1][idx.j] * pw[2][idx.k] * pw[3][idx.l] *
             (inv_fact[idx.i] * inv_fact[idx.j] * inv_fact[idx.k] * inv_fact[idx.l]);
  }
  return out;
}

}  // namespace

std::vector<Complex> coherent_coeffs(const LambdaMatrix& L, std::uint64_t n,
                                     const subspace::BasisSet& basis) {
  return expansion_coeffs(L, basis,
                          std::exp(0.5 * static_cast<double>(n) * log_det_one_minus(L)));
}

std::vector<Complex> coherent_coeffs_unnormalized(const LambdaMatrix& L,
                                                  const subspace::BasisSet& basis) {
  return expansion_coeffs(L, basis, 1.0);
}

Complex overlap(const LambdaMatrix& L1, const LambdaMatrix& L2, std::uint64_t n) {
  const Complex d12 =
      (Eigen::Matrix2cd::Identity() - L1.matrix().adjoint() * L2.matrix()).determinant();
  // Integer power by squaring keeps the phase single-valued.
  Complex cross(1.0, 0.0);
  Complex base = Complex(1.0, 0.0) / d12;
  std::uint64_t e = n;
  while (e > 0) {
    if (e & 1) cross *= base;
    base *= base;
    e >>= 1;
  }
  const double logs = 0.5 * static_cast<double>(n) *
                      (log_det_one_minus(L1) + log_det_one_minus(L2));
  return std::exp(logs) * cross;
}

double q_density(double x, double y, std::uint64_t n) {
  require(n >= 4, "domain", "q_density requires n >= 4");
  require(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0, "domain",
          "q_density requires x, y in [0, 1)");
  const double dn = static_cast<double>(n);
  const double pref = (dn - 1.0) * (dn - 2.0) * (dn - 2.0) * (dn - 3.0);
  const double ox = 1.0 - x;
  const double oy = 1.0 - y;
  return pref * (x - y) * (x - y) / (2.0 * ox * ox * ox * ox * oy * oy * oy * oy);
}

namespace {

// Inverse CDF of the density proportional to 1/(1-t)^4 on [0, eta].
double proposal_coordinate(double eta, double u) {
  const double w = 1.0 + u * (std::pow(1.0 - eta, -3.0) - 1.0);
  return 1.0 - std::pow(w, -1.0 / 3.0);
}

}  // namespace

SingularPair sample_radial(double eta, std::uint64_t n, Rng& rng) {
  require(eta > 0.0 && eta < 1.0, "domain", "sample_radial requires eta in (0, 1)");
  require(n >= 4, "domain", "sample_radial requires n >= 4");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double inv_eta2 = 1.0 / (eta * eta);
  for (;;) {
    const double x = proposal_coordinate(eta, unif(rng));
    const double y = proposal_coordinate(eta, unif(rng));
    const double accept = (x - y) * (x - y) * inv_eta2;
    if (unif(rng) < accept) {
      SingularPair out;
      out.x = std::max(x, y);
      out.y = std::min(x, y);
      return out;
    }
  }
}

Eigen::Matrix2cd haar_u2(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix2cd a;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  Eigen::Matrix2cd q = qr.householderQ();
  const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < 2; ++c) {
    const Complex d = r(c, c);
    q.col(c) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

LambdaMatrix sample_lambda(double eta, std::uint64_t n, Rng& rng) {
  const SingularPair s = sample_radial(eta, n, rng);
  const Eigen::Matrix2cd u = haar_u2(rng);
  const Eigen::Matrix2cd v = haar_u2(rng);
  Eigen::Matrix2cd sigma = Eigen::Matrix2cd::Zero();
  sigma(0, 0) = std::sqrt(s.x);
  sigma(1, 1) = std::sqrt(s.y);
  return LambdaMatrix(u * sigma * v.adjoint());
}

double photon_block_weight(std::uint64_t K, std::uint64_t n, const SingularPair& s) {
  require(n >= 1, "domain", "photon_block_weight requires n >= 1");
  require(s.x >= 0.0 && s.x < 1.0 && s.y >= 0.0 && s.y < 1.0, "domain",
          "photon_block_weight requires squared singular values in [0, 1)");
  const double dn = static_cast<double>(n);
  const double base = dn * (std::log1p(-s.x) + std::log1p(-s.y));
  const double lx = s.x > 0.0 ? std::log(s.x) : 0.0;
  const double ly = s.y > 0.0 ? std::log(s.y) : 0.0;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(K + 1);
  for (std::uint64_t k1 = 0; k1 <= K; ++k1) {
    const std::uint64_t k2 = K - k1;
    if ((s.x == 0.0 && k1 > 0) || (s.y == 0.0 && k2 > 0)) continue;
    const double lt = log_binomial(n + k1 - 1, k1) + log_binomial(n + k2 - 1, k2) +
                      base + static_cast<double>(k1) * lx + static_cast<double>(k2) * ly;
    logs.push_back(lt);
    max_log = std::max(max_log, lt);
  }
  if (logs.empty()) return 0.0;
  double sum = 0.0;
  for (double lt : logs) sum += std::exp(lt - max_log);
  return std::exp(max_log) * sum;
}

}  // namespace gdf::coherent
