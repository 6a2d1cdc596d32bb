#include "gdf/energy_test.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "gdf/bounds.hpp"
#include "gdf/fock_oracle.hpp"
#include "gdf/params.hpp"

namespace gdf::energy {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Split `trials` across 100 substreams of `seed`; count_fn returns the hit
// counts for one substream. Counts are integers and the reduction runs in
// stream order, so the totals do not depend on the worker count.
template <typename CountFn>
std::vector<std::uint64_t> parallel_counts(std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads, std::size_t counters,
                                           CountFn count_fn) {
  constexpr std::size_t kStreams = 100;
  std::vector<std::uint64_t> sizes(kStreams, trials / kStreams);
  for (std::size_t s = 0; s < trials % kStreams; ++s) ++sizes[s];
  std::vector<std::vector<std::uint64_t>> per_stream(kStreams);

  unsigned nthreads = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (nthreads == 0) nthreads = 1;
  nthreads = std::min<unsigned>(nthreads, kStreams);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nthreads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t s = next.fetch_add(1);
        if (s >= kStreams) return;
        Rng rng = substream(seed, s);
        per_stream[s] = count_fn(sizes[s], rng);
      }
    });
  for (auto& t : pool) t.join();

  std::vector<std::uint64_t> totals(counters, 0);
  for (std::size_t s = 0; s < kStreams; ++s)
    for (std::size_t c = 0; c < counters; ++c) totals[c] += per_stream[s][c];
  return totals;
}

RateEstimate wilson(std::uint64_t successes, std::uint64_t trials) {
  RateEstimate est;
  est.trials = trials;
  est.successes = successes;
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  est.rate = p;
  const double z = 3.0;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  est.ci_low = std::max(0.0, center - half);
  est.ci_high = std::min(1.0, center + half);
  return est;
}

Eigen::VectorXcd gaussian_vector(std::uint64_t modes, double per_component_sd, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, per_component_sd);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(modes));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

void TestParams::validate() const {
  require(n >= 1 && k >= 1, "domain", "test params require n, k >= 1");
  require(d_A > 0.0 && d_B > 0.0, "domain", "test thresholds must be positive");
}

Eigen::VectorXcd sample_iid_heterodyne(double mean_photons, std::uint64_t modes, Rng& rng) {
  require(mean_photons >= 0.0, "domain", "mean photon number must be nonnegative");
  return gaussian_vector(modes, std::sqrt((mean_photons + 1.0) / 2.0), rng);
}

HeterodyneRecord symmetrize(const HeterodyneRecord& record, Rng& rng) {
  require(record.alice.size() == record.bob.size(), "length-mismatch",
          "alice and bob must hold equally many modes");
  const int dim = static_cast<int>(record.alice.size());
  const Eigen::MatrixXcd u = fock::haar_unitary(dim, rng);
  HeterodyneRecord out;
  out.alice = u * record.alice;
  out.bob = u.conjugate() * record.bob;
  return out;
}

HeterodyneRecord symmetrize_fast(const HeterodyneRecord& record, Rng& rng) {
  require(record.alice.size() == record.bob.size(), "length-mismatch",
          "alice and bob must hold equally many modes");
  const Eigen::Index dim = record.alice.size();
  // u alpha and conj(u) beta = conj(u conj(beta)): both are images of fixed
  // vectors under the same u, so only the restriction of u to
  // span{alpha, conj(beta)} matters.
  const Eigen::VectorXcd a = record.alice;
  const Eigen::VectorXcd c = record.bob.conjugate();
  const double na = a.norm();
  Eigen::VectorXcd f1 = Eigen::VectorXcd::Zero(dim);
  if (na > 0.0) f1 = a / na;
  const Complex c1 = na > 0.0 ? f1.dot(c) : Complex(0.0, 0.0);
  Eigen::VectorXcd c_perp = c - c1 * f1;
  const double nc = c_perp.norm();

  // Haar 2-frame via Gram-Schmidt of two Gaussian vectors.
  Eigen::VectorXcd e1 = gaussian_vector(dim, 1.0, rng);
  e1.normalize();
  Eigen::VectorXcd e2 = gaussian_vector(dim, 1.0, rng);
  e2 -= e1.dot(e2) * e1;
  e2.normalize();

  HeterodyneRecord out;
  out.alice = na * e1;
  out.bob = (c1 * e1 + nc * e2).conjugate();
  return out;
}

TestOutcome run_test(const HeterodyneRecord& record, const TestParams& params) {
  params.validate();
  const Eigen::Index total = static_cast<Eigen::Index>(params.n + params.k);
  require(record.alice.size() == total && record.bob.size() == total, "length-mismatch",
          "record length must equal n + k");
  TestOutcome out;
  out.Y_rem_A = record.alice.head(static_cast<Eigen::Index>(params.n)).squaredNorm();
  out.Y_rem_B = record.bob.head(static_cast<Eigen::Index>(params.n)).squaredNorm();
  out.Y_A = record.alice.tail(static_cast<Eigen::Index>(params.k)).squaredNorm();
  out.Y_B = record.bob.tail(static_cast<Eigen::Index>(params.k)).squaredNorm();
  const double dk = static_cast<double>(params.k);
  out.passed = out.Y_A <= dk * params.d_A && out.Y_B <= dk * params.d_B;
  return out;
}

Chi2RatioReport chi2_ratio_probability(std::uint64_t n, std::uint64_t k, double d,
                                       const LogReal& eps, std::uint64_t trials,
                                       std::uint64_t seed, unsigned threads) {
  require(d > 0.0, "domain", "chi2_ratio_probability requires d > 0");
  require(trials >= 1, "domain", "chi2_ratio_probability requires trials >= 1");
  Chi2RatioReport rep;
  rep.g = params::g_factor(n, k, eps);
  rep.d = d;
  rep.d_prime = rep.g * d;

  const double lhs_scale = static_cast<double>(k) * d;
  const double rhs_scale = static_cast<double>(n) * rep.d_prime;
  const auto totals = parallel_counts(
      trials, seed, threads, 1, [&](std::uint64_t count, Rng& rng) {
        std::gamma_distribution<double> chi2_2n(static_cast<double>(n), 2.0);
        std::gamma_distribution<double> chi2_2k(static_cast<double>(k), 2.0);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          const double zn = chi2_2n(rng);
          const double zk = chi2_2k(rng);
          if (lhs_scale * zn >= rhs_scale * zk) ++hits;
        }
        return std::vector<std::uint64_t>{hits};
      });
  rep.estimate = wilson(totals[0], trials);

  const double eps_val = eps.value();
  const double x = kLn2 - eps.log_magnitude();  // ln(2/eps)
  const auto lm_n = chi2_tail_bounds(2 * n, x);
  const auto lm_k = chi2_tail_bounds(2 * k, x);
  rep.analytic_bound = (lm_n.upper_bound + lm_k.lower_bound).value();
  // alpha chosen so alpha k d sits exactly on the lower chi^2 threshold; the
  // upper event then needs alpha n d' at or beyond the upper threshold.
  const double alpha = (2.0 * static_cast<double>(k) - lm_k.lower_threshold) / lhs_scale;
  rep.analytic_margin =
      alpha * rhs_scale - (2.0 * static_cast<double>(n) + lm_n.upper_threshold);

  if (eps_val > 0.0 && eps_val * static_cast<double>(trials) >= 10.0) {
    rep.method = "monte-carlo";
    rep.verdict = rep.estimate.ci_high <= eps_val;
  } else {
    rep.method = "analytic";
    rep.verdict = rep.analytic_margin >= -1e-9 * rhs_scale &&
                  !(LogReal::from_double(rep.analytic_bound) > eps);
  }
  return rep;
}

FailureReport failure_event_estimate(const TestParams& params, double mean_photons_A,
                                     double mean_photons_B, EnergyModel model,
                                     const LogReal& eps_test, std::uint64_t trials,
                                     std::uint64_t seed, unsigned threads) {
  params.validate();
  require(trials >= 1, "domain", "failure_event_estimate requires trials >= 1");
  const LogReal quarter = eps_test / LogReal::from_double(4.0);
  const double g = params::g_factor(params.n, params.k, quarter);
  FailureReport rep;
  rep.dprime_A = g * params.d_A;
  rep.dprime_B = g * params.d_B;

  const std::uint64_t total = params.n + params.k;
  const double dn = static_cast<double>(params.n);
  const auto totals = parallel_counts(
      trials, seed, threads, 2, [&](std::uint64_t count, Rng& rng) {
        std::uint64_t passes = 0, failures = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          HeterodyneRecord rec;
          switch (model) {
            case EnergyModel::Thermal:
              rec.alice = sample_iid_heterodyne(mean_photons_A, total, rng);
              rec.bob = sample_iid_heterodyne(mean_photons_B, total, rng);
              break;
            case EnergyModel::AdversarialConcentrated: {
              // Same total signal energy, all of it on the unmeasured modes.
              const double boost = static_cast<double>(total) / dn;
              rec.alice.resize(static_cast<Eigen::Index>(total));
              rec.bob.resize(static_cast<Eigen::Index>(total));
              rec.alice.head(static_cast<Eigen::Index>(params.n)) =
                  sample_iid_heterodyne(mean_photons_A * boost, params.n, rng);
              rec.alice.tail(static_cast<Eigen::Index>(params.k)) =
                  sample_iid_heterodyne(0.0, params.k, rng);
              rec.bob.head(static_cast<Eigen::Index>(params.n)) =
                  sample_iid_heterodyne(mean_photons_B * boost, params.n, rng);
              rec.bob.tail(static_cast<Eigen::Index>(params.k)) =
                  sample_iid_heterodyne(0.0, params.k, rng);
              break;
            }
          }
          const TestOutcome outcome = run_test(symmetrize_fast(rec, rng), params);
          if (!outcome.passed) continue;
          ++passes;
          if (outcome.Y_rem_A >= dn * rep.dprime_A || outcome.Y_rem_B >= dn * rep.dprime_B)
            ++failures;
        }
        return std::vector<std::uint64_t>{passes, failures};
      });
  const std::uint64_t passes = totals[0];
  const std::uint64_t failures = totals[1];
  rep.joint = wilson(failures, trials);
  rep.conditional = passes > 0 ? wilson(failures, passes) : RateEstimate{};
  rep.pass_rate = static_cast<double>(passes) / static_cast<double>(trials);
  rep.verdict = !(LogReal::from_double(rep.joint.ci_high) > eps_test);
  return rep;
}

}  // namespace gdf::energy
