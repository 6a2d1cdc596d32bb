#pragma once

#include <cstdint>

#include "gdf/log_real.hpp"

namespace gdf {

/// Binary relative entropy D(x||y) = x ln(x/y) + (1-x) ln((1-x)/(1-y)) in
/// nats, with the 0 ln 0 = 0 convention. Returns +infinity when y is 0 or 1
/// and x differs from it.
///
/// Nats (not bits) everywhere: every exponential bound below is of the form
/// exp(-N D), which is only a valid Chernoff-type bound with D in nats.
double rel_entropy(double x, double y);

/// Pinsker lower bound 2 (x-y)^2 <= rel_entropy(x, y), nats.
double pinsker_lower_bound(double x, double y);

/// Binomial CDF F(K, N, p) = Pr[Bin(N, p) <= K], summed in log domain from
/// the smaller tail with compensated accumulation.
LogReal binom_tail_exact(std::uint64_t K, std::uint64_t N, double p);

/// Chernoff upper tail: Pr[Bin(n, p) >= (p+t) n] <= exp(-n D(p+t||p)),
/// for t in [0, 1-p].
LogReal chernoff_tail_bound(std::uint64_t n, double p, double t);

/// Upper tail of a Beta(k, n) variable, 1 - I_eta(k, n), via the binomial
/// identity 1 - I_eta(k, n) = F(k-1, n+k-1, eta).
LogReal reg_beta_tail_exact(double eta, std::uint64_t k, std::uint64_t n);

/// Chernoff bound on the Beta upper tail:
///   1 - I_eta(k, n) <= exp(-(n+k-1) D((k-1)/(n+k-1) || eta)),
/// valid for eta >= (k-1)/(n+k-1). Dominates reg_beta_tail_exact on its whole
/// validity region, with equality at k = 1.
LogReal reg_beta_tail_bound(double eta, std::uint64_t k, std::uint64_t n);

/// Laurent-Massart deviation bounds for U ~ chi^2(D):
///   Pr[U - D >= 2 sqrt(D x) + 2 x] <= exp(-x)
///   Pr[D - U >= 2 sqrt(D x)]       <= exp(-x)
struct Chi2TailBounds {
  double upper_threshold;  // 2 sqrt(D x) + 2 x
  double lower_threshold;  // 2 sqrt(D x)
  LogReal upper_bound;     // exp(-x)
  LogReal lower_bound;     // exp(-x)
};
Chi2TailBounds chi2_tail_bounds(std::uint64_t D, double x);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s);
/// the upper-tail probability of a Gamma(s, 1) variable.
double incomplete_gamma_Q(double s, double x);

/// ln C(n, k).
double log_binomial(std::uint64_t n, std::uint64_t k);

}  // namespace gdf
