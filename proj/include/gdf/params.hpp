#pragma once

#include <cstdint>
#include <functional>

#include "gdf/log_real.hpp"

namespace gdf::params {

/// Protocol-level inputs of the reduction: block length, energy-test size and
/// thresholds, and the two epsilon budgets (collective security and test
/// failure).
struct ProtocolInput {
  std::uint64_t n = 0;       // key modes
  std::uint64_t k = 0;       // test modes
  double d_A = 0.0;          // photons per mode, Alice threshold
  double d_B = 0.0;          // photons per mode, Bob threshold
  LogReal eps_coll;          // collective-attack security parameter
  LogReal eps_test;          // energy-test failure budget

  void validate() const;
};

struct DerivedParams {
  double g = 0.0;
  double dprime_A = 0.0;
  double dprime_B = 0.0;
  std::uint64_t K = 0;       // photon cutoff
  std::uint64_t N = 0;       // n - 5
  double eta_star = 0.0;
  double T = 0.0;            // volume of the bounded-energy coherent region
  LogReal eps_definetti;
  bool eps_definetti_vacuous = false;
  LogReal eps_prime_exact;     // 2 eps_coll (T+1) + eps_test
  LogReal eps_prime_envelope;  // K^4/50 eps_coll + eps_test
  std::uint64_t key_reduction_bits = 0;
  std::uint64_t n_star = 0;    // N*(K/N)
  bool definetti_applicable = false;  // n - 5 >= N*(K/N)
};

/// Threshold inflation factor
///   g(n,k,eps) = (1 + 2 sqrt(L/2n) + L/n) / (1 - 2 sqrt(L/2k)),  L = ln(2/eps).
/// Always > 1. Requires k > 2 ln(2/eps) so the denominator is positive.
double g_factor(std::uint64_t n, std::uint64_t k, const LogReal& eps);

/// K = max{1, ceil(n (d_A + d_B) g(n, k, eps_test/4))}.
std::uint64_t photon_cutoff_K(const ProtocolInput& input);

/// eta* = (K - n + 5) / (K + n - 5); satisfies (1+eta*)/(1-eta*) = K/(n-5).
double eta_star(std::uint64_t n, std::uint64_t K);

/// T(n, eta) = (n-1)(n-2)^2(n-3) eta^4 / (12 (1-eta)^4).
double volume_T(std::uint64_t n, double eta);

struct DefinettiEpsilon {
  LogReal value;
  bool vacuous = false;  // value >= 1: reported, never clamped
};

/// eps = 2 N^4 (1 + K/N)^7 exp(-N D(K/(K+N) || eta)), N = n-5.
/// Requires n >= 5 and K <= eta N / (1 - eta).
DefinettiEpsilon definetti_epsilon(std::uint64_t n, std::uint64_t K, double eta);

/// N*(alpha) = max{38, min{N : 2 (1+alpha)^7 N^4 exp(-2N/((1+alpha)^2 ln 2)) <= 1/2}}.
std::uint64_t N_star(double alpha);

/// ceil(2 log2 C(K+4, 4)).
std::uint64_t key_reduction_bits(std::uint64_t K);

/// Full composition: fills every derived quantity and both eps' routes.
/// Throws "infeasible-parameters" when n < 38 or K < n - 5; an unmet
/// N*-condition is reported through definetti_applicable instead.
DerivedParams compose_security(const ProtocolInput& input);

/// Smallest n (bracketing + binary search, n <= 2^60) whose composed
/// eps'_exact meets the target with k = ceil(k_ratio n). The callback maps n
/// to the collective-attack epsilon and must be monotone nonincreasing.
std::uint64_t min_blocklength(const LogReal& target_eps_prime, double k_ratio,
                              double d_A, double d_B, const LogReal& eps_test,
                              const std::function<LogReal(std::uint64_t)>& eps_coll_of_n);

}  // namespace gdf::params
