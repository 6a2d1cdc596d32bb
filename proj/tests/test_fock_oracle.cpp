#include <doctest.h>

#include <cmath>
#include <random>

#include "gdf/fock_oracle.hpp"
#include "support/quadrature.hpp"

namespace fock = gdf::fock;
namespace coherent = gdf::coherent;
using Complex = std::complex<double>;
using gdf::subspace::MonomialIndex;

namespace {

coherent::LambdaMatrix random_lambda(gdf::Rng& rng, double max_norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::Matrix2cd m;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
    m *= max_norm / 2.0;
    if (m.operatorNorm() < max_norm) return coherent::LambdaMatrix(m);
  }
}

}  // namespace

TEST_CASE("fock space enumeration") {
  const fock::FockSpace space(4, 2);
  CHECK(space.size() == 15);  // C(6, 4)
  CHECK(space.total_photons(0) == 0);
  for (std::size_t i = 0; i < space.size(); ++i)
    CHECK(space.index_of(space.occupation(i)) == i);
  // graded: totals never decrease along the ordering
  for (std::size_t i = 1; i < space.size(); ++i)
    CHECK(space.total_photons(i) >= space.total_photons(i - 1));
  CHECK_THROWS_WITH_AS(fock::FockSpace(40, 30), doctest::Contains("resource-guard"),
                       gdf::Error);
}

TEST_CASE("pair creation operators") {
  const std::uint32_t n = 1;
  const fock::FockSpace space(4, 4);
  const auto Z11 = fock::build_Z(space, fock::PairKind::Z11, n);
  const Eigen::VectorXcd vac = space.basis_state(fock::Occupation(4, 0));
  const Eigen::VectorXcd v = Z11 * vac;
  fock::Occupation want(4, 0);
  want[0] = 1;
  want[1] = 1;  // one photon in a_1 and b_1
  CHECK(std::abs(v(space.index_of(want)) - Complex(1, 0)) < 1e-15);
  CHECK(v.norm() == doctest::Approx(1.0));

  for (std::uint32_t nn : {1, 2, 3}) {
    const fock::FockSpace sp(4 * nn, 2);
    const Eigen::VectorXcd vv = sp.basis_state(fock::Occupation(4 * nn, 0));
    for (auto kind : {fock::PairKind::Z11, fock::PairKind::Z12, fock::PairKind::Z21,
                      fock::PairKind::Z22}) {
      const auto Z = fock::build_Z(sp, kind, nn);
      CHECK((Z * vv).squaredNorm() == doctest::Approx(static_cast<double>(nn)));
    }
  }

  // creation operators commute within the cutoff
  const fock::FockSpace sp2(8, 6);
  const auto A = fock::build_Z(sp2, fock::PairKind::Z11, 2);
  const auto B = fock::build_Z(sp2, fock::PairKind::Z12, 2);
  const Eigen::VectorXcd v2 = sp2.basis_state(fock::Occupation(8, 0));
  CHECK(((A * (B * v2)) - (B * (A * v2))).norm() < 1e-14);
}

TEST_CASE("monomial vectors") {
  const std::uint32_t n = 3;
  const fock::FockSpace space(12, 6);
  const Eigen::VectorXcd vac = fock::monomial_vector(space, {0, 0, 0, 0}, n);
  CHECK(vac(0) == Complex(1, 0));
  CHECK(vac.norm() == doctest::Approx(1.0));
  const Eigen::VectorXcd v = fock::monomial_vector(space, {1, 0, 0, 0}, n);
  CHECK(v.squaredNorm() == doctest::Approx(static_cast<double>(n)));
  const Eigen::VectorXcd w = fock::monomial_vector(space, {1, 1, 1, 0}, n);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > 0)
      CHECK(space.total_photons(static_cast<std::size_t>(i)) == 6);
  }
  CHECK_THROWS_AS(fock::monomial_vector(space, {2, 2, 0, 0}, n), gdf::Error);
}

TEST_CASE("gram oracle basics") {
  const Eigen::MatrixXcd G = fock::gram_oracle(1, 1);
  CHECK(G.rows() == 5);
  CHECK(std::abs(G(0, 0) - Complex(1, 0)) < 1e-14);
  for (int a = 1; a < 5; ++a)
    for (int b = 1; b < 5; ++b)
      CHECK(std::abs(G(a, b) - (a == b ? Complex(1, 0) : Complex(0, 0))) < 1e-14);

  const Eigen::MatrixXcd G4 = fock::gram_oracle(4, 2);
  CHECK((G4 - G4.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G4);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  // photon-number superselection: cross-degree blocks vanish identically
  const gdf::subspace::BasisSet basis(2);
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b < basis.size(); ++b)
      if (basis[a].total() != basis[b].total()) CHECK(std::abs(G4(a, b)) == 0.0);
}

TEST_CASE("truncated coherent state") {
  const std::uint32_t n = 2;
  const fock::FockSpace space(8, 12);
  const coherent::LambdaMatrix zero(Complex(0, 0), Complex(0, 0), Complex(0, 0),
                                    Complex(0, 0));
  const auto vac = fock::coherent_truncated(space, zero, n);
  CHECK(vac.tail == 0.0);
  CHECK(std::abs(vac.v(0) - Complex(1, 0)) < 1e-15);

  gdf::Rng rng(8);
  const coherent::LambdaMatrix L = random_lambda(rng, 0.45);
  const auto tc = fock::coherent_truncated(space, L, n, 1e-3);
  CHECK(tc.v.squaredNorm() == doctest::Approx(1.0 - tc.tail).epsilon(1e-12));

  // Per-degree mass against the closed-form block weights.
  const auto masses = fock::truncated_block_masses(L, n, 6);
  const auto sq = coherent::singular_squares(L);
  for (std::uint32_t d = 0; d <= 6; ++d) {
    CHECK(masses[d] ==
          doctest::Approx(coherent::photon_block_weight(d, n, sq)).epsilon(1e-10));
  }

  // The dense tensor route agrees with the per-degree convolution route.
  gdf::Rng rng2(9);
  const coherent::LambdaMatrix L2 = random_lambda(rng2, 0.45);
  const auto tc2 = fock::coherent_truncated(space, L2, n, 1e-3);
  const Complex dense = tc.v.dot(tc2.v);
  const Complex conv = fock::truncated_overlap(L, L2, n, 12);
  CHECK(std::abs(dense - conv) < 1e-12);

  CHECK_THROWS_WITH_AS(
      fock::coherent_truncated(space, L, n, 1e-16),
      doctest::Contains("tail-too-large"), gdf::Error);
}

TEST_CASE("energy operator eigenvalues") {
  CHECK(fock::heterodyne_tail_eigenvalue(5, 3, 0.0) == 1.0);
  for (double d : {0.3, 1.0, 4.0})
    CHECK(fock::heterodyne_tail_eigenvalue(0, 1, d) == doctest::Approx(std::exp(-d)).epsilon(1e-13));
  CHECK(fock::heterodyne_tail_eigenvalue(2, 1, 1.0) ==
        doctest::Approx(0.9196986029286058).epsilon(1e-13));

  // Single-mode quadrature: eigenvalue on |M> is int_d^inf s^M e^-s / M! ds.
  for (std::uint64_t M : {0, 1, 2, 5}) {
    for (double d : {0.5, 1.0, 3.0}) {
      const auto f = [&](double s) {
        return std::exp(M * std::log(s) - s - std::lgamma(M + 1.0));
      };
      const double want = testsupport::integrate_1d(f, d, d + 60.0, 220);
      CHECK(fock::heterodyne_tail_eigenvalue(M, 1, d) == doctest::Approx(want).epsilon(1e-8));
    }
  }

  // monotone in d (down) and in M (up)
  CHECK(fock::heterodyne_tail_eigenvalue(4, 2, 1.0) > fock::heterodyne_tail_eigenvalue(4, 2, 2.0));
  CHECK(fock::heterodyne_tail_eigenvalue(5, 2, 1.0) > fock::heterodyne_tail_eigenvalue(4, 2, 1.0));
}

TEST_CASE("U dominated by 2T on Fock levels") {
  const auto single = fock::verify_cutoff_domination(1, 1.0, 2);
  CHECK(single.all_positive);
  CHECK(single.min_margin == doctest::Approx(2.0 * 0.9196986029286058 - 1.0).epsilon(1e-12));

  const auto sweep = fock::verify_cutoff_domination(7, 3.5, 100);
  CHECK(sweep.all_positive);
  CHECK(sweep.checked == 100 - 24);  // M from floor(24.5)+1 = 25 through 100
}

TEST_CASE("monomial vectors are rotation invariant") {
  gdf::Rng rng(1234);
  CHECK(fock::invariance_check(2, {1, 0, 0, 0}, 20, rng) <= 1e-9);
  CHECK(fock::invariance_check(2, {0, 1, 1, 0}, 10, rng) <= 1e-9);
  CHECK(fock::invariance_check(3, {1, 0, 0, 1}, 5, rng) <= 1e-9);

  // identity unitary moves nothing
  const fock::FockSpace space(8, 4);
  const Eigen::VectorXcd v = fock::monomial_vector(space, {1, 0, 0, 0}, 2).normalized();
  const Eigen::VectorXcd w = fock::apply_W(space, Eigen::MatrixXcd::Identity(2, 2), v);
  CHECK((w - v).norm() < 1e-12);

  // negative control: a bare a_1^dag b_1^dag |0> term is not invariant
  fock::Occupation occ(8, 0);
  occ[0] = 1;
  occ[2] = 1;  // a_1 and b_1 for n = 2
  const Eigen::VectorXcd bare = space.basis_state(occ);
  double dev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXcd u = fock::haar_unitary(2, rng);
    dev = std::max(dev, (fock::apply_W(space, u, bare) - bare).norm());
  }
  CHECK(dev > 1e-3);
}
