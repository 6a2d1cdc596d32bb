#include "gdf/bounds.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

namespace gdf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double v, const char* name) {
  require(v >= 0.0 && v <= 1.0, "domain", std::string(name) + " must lie in [0, 1]");
}

double log_binom_pmf(std::uint64_t j, std::uint64_t N, double log_p, double log_q) {
  return log_binomial(N, j) + static_cast<double>(j) * log_p +
         static_cast<double>(N - j) * log_q;
}

// Streaming logsumexp with Kahan compensation relative to a running maximum.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term > max_) {
      const double scale = std::exp(max_ - log_term);
      sum_ *= scale;
      comp_ *= scale;
      max_ = log_term;
    }
    const double t = std::exp(log_term - max_);
    const double y = t - comp_;
    const double s = sum_ + y;
    comp_ = (s - sum_) - y;
    sum_ = s;
  }

  double log_value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : -kInf; }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double log_binomial(std::uint64_t n, std::uint64_t k) {
  require(k <= n, "domain", "log_binomial requires k <= n");
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double rel_entropy(double x, double y) {
  require_probability(x, "x");
  require_probability(y, "y");
  if (x == y) return 0.0;
  if (y == 0.0 || y == 1.0) return kInf;  // x != y here
  double t1 = 0.0;
  if (x > 0.0) t1 = x * std::log1p((x - y) / y);
  double t2 = 0.0;
  if (x < 1.0) t2 = (1.0 - x) * std::log1p((y - x) / (1.0 - y));
  const double d = t1 + t2;
  return d > 0.0 ? d : 0.0;
}

double pinsker_lower_bound(double x, double y) {
  require_probability(x, "x");
  require_probability(y, "y");
  return 2.0 * (x - y) * (x - y);
}

LogReal binom_tail_exact(std::uint64_t K, std::uint64_t N, double p) {
  require_probability(p, "p");
  require(K <= N, "domain", "binom_tail_exact requires K <= N");
  if (K == N) return LogReal::one();
  if (p == 0.0) return LogReal::one();
  if (p == 1.0) return LogReal::zero();  // K < N
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  // Sum whichever tail carries the smaller mass: summing the near-1 side and
  // complementing would floor the result at machine epsilon.
  if (static_cast<double>(K) < static_cast<double>(N) * p) {
    LogSum acc;
    for (std::uint64_t j = 0; j <= K; ++j) acc.add(log_binom_pmf(j, N, log_p, log_q));
    return LogReal::exp_of(acc.log_value());
  }
  LogSum acc;
  for (std::uint64_t j = K + 1; j <= N; ++j) acc.add(log_binom_pmf(j, N, log_p, log_q));
  return one_minus(LogReal::exp_of(acc.log_value()));
}

LogReal chernoff_tail_bound(std::uint64_t n, double p, double t) {
  require_probability(p, "p");
  require(t >= 0.0 && t <= 1.0 - p, "domain", "chernoff_tail_bound requires t in [0, 1-p]");
  return LogReal::exp_of(-static_cast<double>(n) * rel_entropy(p + t, p));
}

LogReal reg_beta_tail_exact(double eta, std::uint64_t k, std::uint64_t n) {
  require_probability(eta, "eta");
  require(k >= 1 && n >= 1, "domain", "reg_beta_tail_exact requires k, n >= 1");
  return binom_tail_exact(k - 1, n + k - 1, eta);
}

LogReal reg_beta_tail_bound(double eta, std::uint64_t k, std::uint64_t n) {
  require_probability(eta, "eta");
  require(k >= 1 && n >= 1, "domain", "reg_beta_tail_bound requires k, n >= 1");
  const double N = static_cast<double>(n + k - 1);
  const double x0 = static_cast<double>(k - 1) / N;
  require(eta >= x0, "beta-tail-precondition",
          "reg_beta_tail_bound requires eta >= (k-1)/(n+k-1)");
  return LogReal::exp_of(-N * rel_entropy(x0, eta));
}

Chi2TailBounds chi2_tail_bounds(std::uint64_t D, double x) {
  require(D >= 1, "domain", "chi2_tail_bounds requires D >= 1");
  require(x >= 0.0, "domain", "chi2_tail_bounds requires x >= 0");
  const double root = 2.0 * std::sqrt(static_cast<double>(D) * x);
  Chi2TailBounds out;
  out.upper_threshold = root + 2.0 * x;
  out.lower_threshold = root;
  out.upper_bound = LogReal::exp_of(-x);
  out.lower_bound = LogReal::exp_of(-x);
  return out;
}

double incomplete_gamma_Q(double s, double x) {
  require(s > 0.0, "domain", "incomplete_gamma_Q requires s > 0");
  require(x >= 0.0, "domain", "incomplete_gamma_Q requires x >= 0");
  return boost::math::gamma_q(s, x);
}

}  // namespace gdf
