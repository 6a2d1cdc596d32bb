#include "gdf/params.hpp"

#include <cmath>

#include "gdf/bounds.hpp"

namespace gdf::params {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double ln_two_over(const LogReal& eps) {
  require(eps.sign() > 0 && eps < LogReal::one(), "domain", "epsilon must lie in (0, 1)");
  return kLn2 - eps.log_magnitude();
}

// ln of the N* criterion value 2 (1+alpha)^7 N^4 exp(-2N / ((1+alpha)^2 ln 2)).
double log_nstar_criterion(double alpha, double N) {
  return kLn2 + 7.0 * std::log1p(alpha) + 4.0 * std::log(N) -
         2.0 * N / ((1.0 + alpha) * (1.0 + alpha) * kLn2);
}

}  // namespace

void ProtocolInput::validate() const {
  require(n >= 1 && k >= 1, "domain", "n and k must be >= 1");
  require(d_A > 0.0 && d_B > 0.0, "domain", "energy thresholds must be positive");
  require(eps_coll.sign() >= 0 && eps_coll < LogReal::one(), "domain",
          "eps_coll must lie in [0, 1)");
  require(eps_test.sign() > 0 && eps_test < LogReal::one(), "domain",
          "eps_test must lie in (0, 1)");
}

double g_factor(std::uint64_t n, std::uint64_t k, const LogReal& eps) {
  require(n >= 1 && k >= 1, "domain", "g_factor requires n, k >= 1");
  const double L = ln_two_over(eps);
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double den = 1.0 - 2.0 * std::sqrt(L / (2.0 * dk));
  require(den > 0.0, "test-modes-too-few",
          "g_factor requires k > 2 ln(2/eps) test modes");
  const double num = 1.0 + 2.0 * std::sqrt(L / (2.0 * dn)) + L / dn;
  return num / den;
}

std::uint64_t photon_cutoff_K(const ProtocolInput& input) {
  input.validate();
  const LogReal quarter = input.eps_test / LogReal::from_double(4.0);
  const double g = g_factor(input.n, input.k, quarter);
  const double v = static_cast<double>(input.n) * (input.d_A + input.d_B) * g;
  require(v < 9.0e18, "domain", "photon cutoff overflows the count type");
  const double c = std::ceil(v);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

double eta_star(std::uint64_t n, std::uint64_t K) {
  require(n >= 6, "domain", "eta_star requires n >= 6");
  require(K >= n - 5, "domain", "eta_star requires K >= n - 5");
  const double N = static_cast<double>(n - 5);
  const double dK = static_cast<double>(K);
  return (dK - N) / (dK + N);
}

double volume_T(std::uint64_t n, double eta) {
  require(n >= 4, "domain", "volume_T requires n >= 4");
  require(eta >= 0.0 && eta < 1.0, "domain", "volume_T requires eta in [0, 1)");
  const double dn = static_cast<double>(n);
  const double pref = (dn - 1.0) * (dn - 2.0) * (dn - 2.0) * (dn - 3.0);
  const double r = eta / (1.0 - eta);
  return pref * r * r * r * r / 12.0;
}

DefinettiEpsilon definetti_epsilon(std::uint64_t n, std::uint64_t K, double eta) {
  require(n >= 5, "domain", "definetti_epsilon requires n >= 5");
  require(eta >= 0.0 && eta < 1.0, "domain", "definetti_epsilon requires eta in [0, 1)");
  require(K >= 1, "domain", "definetti_epsilon requires K >= 1");
  const double N = static_cast<double>(n - 5);
  const double dK = static_cast<double>(K);
  require(dK <= eta * N / (1.0 - eta), "K-exceeds-eta-envelope",
          "definetti_epsilon requires K <= eta N / (1 - eta)");
  const double log_eps = kLn2 + 4.0 * std::log(N) + 7.0 * std::log1p(dK / N) -
                         N * rel_entropy(dK / (dK + N), eta);
  DefinettiEpsilon out;
  out.value = LogReal::exp_of(log_eps);
  out.vacuous = !(out.value < LogReal::one());
  return out;
}

std::uint64_t N_star(double alpha) {
  require(alpha >= 1.0, "domain", "N_star requires alpha >= 1");
  const double target = -kLn2;  // criterion <= 1/2
  auto satisfied = [&](std::uint64_t N) {
    return log_nstar_criterion(alpha, static_cast<double>(N)) <= target;
  };
  std::uint64_t hi = 1;
  while (!satisfied(hi)) {
    require(hi < (std::uint64_t{1} << 62), "unachievable", "N_star search overflow");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // hi >= 2 here since N = 1 never satisfies for alpha >= 1
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (satisfied(mid) ? hi : lo) = mid;
  }
  return hi < 38 ? 38 : hi;
}

std::uint64_t key_reduction_bits(std::uint64_t K) {
  const double bits = 2.0 * log_binomial(K + 4, 4) / kLn2;
  const double r = std::nearbyint(bits);
  if (std::abs(bits - r) < 1e-9) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(bits));
}

DerivedParams compose_security(const ProtocolInput& input) {
  input.validate();
  DerivedParams out;
  const LogReal quarter = input.eps_test / LogReal::from_double(4.0);
  out.g = g_factor(input.n, input.k, quarter);
  out.dprime_A = input.d_A * out.g;
  out.dprime_B = input.d_B * out.g;
  out.K = photon_cutoff_K(input);
  require(input.n >= 38, "infeasible-parameters", "composition requires n >= 38");
  require(out.K >= input.n - 5, "infeasible-parameters",
          "composition requires K >= n - 5");
  out.N = input.n - 5;
  out.eta_star = eta_star(input.n, out.K);
  out.T = volume_T(input.n, out.eta_star);

  // De Finetti failure parameter at the canonical eta*, in the Pinsker form
  // that the N* feasibility condition controls; <= 1/2 whenever applicable.
  const double alpha = static_cast<double>(out.K) / static_cast<double>(out.N);
  out.eps_definetti = LogReal::exp_of(
      log_nstar_criterion(alpha, static_cast<double>(out.N)));
  out.eps_definetti_vacuous = !(out.eps_definetti < LogReal::one());
  out.n_star = N_star(alpha);
  out.definetti_applicable = out.N >= out.n_star;

  const LogReal two = LogReal::from_double(2.0);
  const LogReal T_plus_1 = LogReal::from_double(out.T) + LogReal::one();
  out.eps_prime_exact = two * input.eps_coll * T_plus_1 + input.eps_test;
  const LogReal K4_over_50 =
      LogReal::from_double(static_cast<double>(out.K)).pow(4.0) /
      LogReal::from_double(50.0);
  out.eps_prime_envelope = K4_over_50 * input.eps_coll + input.eps_test;
  out.key_reduction_bits = key_reduction_bits(out.K);
  return out;
}

std::uint64_t min_blocklength(const LogReal& target_eps_prime, double k_ratio,
                              double d_A, double d_B, const LogReal& eps_test,
                              const std::function<LogReal(std::uint64_t)>& eps_coll_of_n) {
  require(k_ratio > 0.0, "domain", "min_blocklength requires a positive test-mode ratio");
  constexpr std::uint64_t kMaxN = std::uint64_t{1} << 60;

  auto make_input = [&](std::uint64_t n) {
    ProtocolInput in;
    in.n = n;
    in.k = static_cast<std::uint64_t>(std::ceil(k_ratio * static_cast<double>(n)));
    if (in.k < 1) in.k = 1;
    in.d_A = d_A;
    in.d_B = d_B;
    in.eps_coll = eps_coll_of_n(n);
    in.eps_test = eps_test;
    return in;
  };
  auto legal = [&](std::uint64_t n) {
    try {
      compose_security(make_input(n));
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  auto meets = [&](std::uint64_t n) {
    const DerivedParams d = compose_security(make_input(n));
    return d.definetti_applicable && !(d.eps_prime_exact > target_eps_prime);
  };

  // Legality (k large enough, K >= n-5) is monotone in n at fixed ratio.
  std::uint64_t lo_legal = 38;
  while (lo_legal <= kMaxN && !legal(lo_legal)) lo_legal *= 2;
  require(lo_legal <= kMaxN, "unachievable", "no legal block length below 2^60");
  if (lo_legal > 38) {
    std::uint64_t bad = lo_legal / 2, good = lo_legal;
    while (good - bad > 1) {
      const std::uint64_t mid = bad + (good - bad) / 2;
      (legal(mid) ? good : bad) = mid;
    }
    lo_legal = good;
  }

  if (meets(lo_legal)) return lo_legal;
  std::uint64_t hi = lo_legal;
  do {
    require(hi < kMaxN, "unachievable", "no block length below 2^60 meets the target");
    hi = hi >= kMaxN / 2 ? kMaxN : hi * 2;
  } while (!meets(hi));
  std::uint64_t lo = hi / 2 < lo_legal ? lo_legal : hi / 2;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (meets(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace gdf::params
