#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gdf/bounds.hpp"
#include "gdf/coherent.hpp"
#include "gdf/energy_test.hpp"
#include "gdf/fock_oracle.hpp"
#include "gdf/params.hpp"
#include "gdf/subspace.hpp"

namespace py = pybind11;

using gdf::LogReal;

namespace {

LogReal to_log_real(double v) { return LogReal::from_double(v); }

py::dict log_real_dict(const LogReal& v) {
  py::dict d;
  d["sign"] = v.sign();
  d["ln_magnitude"] = v.log_magnitude();
  d["value"] = v.value();
  return d;
}

py::dict derived_dict(const gdf::params::DerivedParams& d) {
  py::dict out;
  out["g"] = d.g;
  out["dprime_A"] = d.dprime_A;
  out["dprime_B"] = d.dprime_B;
  out["K"] = d.K;
  out["N"] = d.N;
  out["eta_star"] = d.eta_star;
  out["T"] = d.T;
  out["eps_definetti"] = log_real_dict(d.eps_definetti);
  out["eps_definetti_vacuous"] = d.eps_definetti_vacuous;
  out["eps_prime_exact"] = log_real_dict(d.eps_prime_exact);
  out["eps_prime_envelope"] = log_real_dict(d.eps_prime_envelope);
  out["key_reduction_bits"] = d.key_reduction_bits;
  out["n_star"] = d.n_star;
  out["definetti_applicable"] = d.definetti_applicable;
  return out;
}

gdf::coherent::LambdaMatrix lambda_from(const Eigen::MatrixXcd& m) {
  gdf::require(m.rows() == 2 && m.cols() == 2, "domain", "Lambda must be 2 x 2");
  return gdf::coherent::LambdaMatrix(Eigen::Matrix2cd(m));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-size security bounds for continuous-variable QKD via a "
            "rotation-invariant reduction";

  py::register_exception<gdf::Error>(m, "GdfError");

  // concentration bounds / special functions
  m.def("rel_entropy", &gdf::rel_entropy, py::arg("x"), py::arg("y"));
  m.def("pinsker_lower_bound", &gdf::pinsker_lower_bound, py::arg("x"), py::arg("y"));
  m.def(
      "binom_tail_exact",
      [](std::uint64_t K, std::uint64_t N, double p) {
        return log_real_dict(gdf::binom_tail_exact(K, N, p));
      },
      py::arg("K"), py::arg("N"), py::arg("p"));
  m.def(
      "chernoff_tail_bound",
      [](std::uint64_t n, double p, double t) {
        return log_real_dict(gdf::chernoff_tail_bound(n, p, t));
      },
      py::arg("n"), py::arg("p"), py::arg("t"));
  m.def(
      "reg_beta_tail_exact",
      [](double eta, std::uint64_t k, std::uint64_t n) {
        return log_real_dict(gdf::reg_beta_tail_exact(eta, k, n));
      },
      py::arg("eta"), py::arg("k"), py::arg("n"));
  m.def(
      "reg_beta_tail_bound",
      [](double eta, std::uint64_t k, std::uint64_t n) {
        return log_real_dict(gdf::reg_beta_tail_bound(eta, k, n));
      },
      py::arg("eta"), py::arg("k"), py::arg("n"));
  m.def(
      "chi2_tail_bounds",
      [](std::uint64_t D, double x) {
        const auto b = gdf::chi2_tail_bounds(D, x);
        py::dict d;
        d["upper_threshold"] = b.upper_threshold;
        d["lower_threshold"] = b.lower_threshold;
        d["bound"] = b.upper_bound.value();
        return d;
      },
      py::arg("D"), py::arg("x"));
  m.def("incomplete_gamma_Q", &gdf::incomplete_gamma_Q, py::arg("s"), py::arg("x"));

  // parameter engine
  m.def("g_factor",
        [](std::uint64_t n, std::uint64_t k, double eps) {
          return gdf::params::g_factor(n, k, to_log_real(eps));
        },
        py::arg("n"), py::arg("k"), py::arg("eps"));
  m.def("eta_star", &gdf::params::eta_star, py::arg("n"), py::arg("K"));
  m.def("volume_T", &gdf::params::volume_T, py::arg("n"), py::arg("eta"));
  m.def(
      "definetti_epsilon",
      [](std::uint64_t n, std::uint64_t K, double eta) {
        const auto d = gdf::params::definetti_epsilon(n, K, eta);
        py::dict out = log_real_dict(d.value);
        out["vacuous"] = d.vacuous;
        return out;
      },
      py::arg("n"), py::arg("K"), py::arg("eta"));
  m.def("N_star", &gdf::params::N_star, py::arg("alpha"));
  m.def("key_reduction_bits", &gdf::params::key_reduction_bits, py::arg("K"));
  m.def(
      "compose_security",
      [](std::uint64_t n, std::uint64_t k, double d_A, double d_B, double eps_coll,
         double eps_test) {
        gdf::params::ProtocolInput in;
        in.n = n;
        in.k = k;
        in.d_A = d_A;
        in.d_B = d_B;
        in.eps_coll = to_log_real(eps_coll);
        in.eps_test = to_log_real(eps_test);
        return derived_dict(gdf::params::compose_security(in));
      },
      py::arg("n"), py::arg("k"), py::arg("d_A"), py::arg("d_B"), py::arg("eps_coll"),
      py::arg("eps_test"));
  m.def(
      "min_blocklength",
      [](double target_eps_prime, double k_ratio, double d_A, double d_B, double eps_test,
         const std::function<double(std::uint64_t)>& eps_coll_of_n) {
        return gdf::params::min_blocklength(
            to_log_real(target_eps_prime), k_ratio, d_A, d_B, to_log_real(eps_test),
            [&](std::uint64_t n) { return to_log_real(eps_coll_of_n(n)); });
      },
      py::arg("target_eps_prime"), py::arg("k_ratio"), py::arg("d_A"), py::arg("d_B"),
      py::arg("eps_test"), py::arg("eps_coll_of_n"));

  // coherent states
  m.def(
      "in_region",
      [](const Eigen::MatrixXcd& L, double eta) {
        return gdf::coherent::in_region(lambda_from(L), eta);
      },
      py::arg("Lambda"), py::arg("eta"));
  m.def(
      "singular_squares",
      [](const Eigen::MatrixXcd& L) {
        const auto s = gdf::coherent::singular_squares(lambda_from(L));
        return std::make_pair(s.x, s.y);
      },
      py::arg("Lambda"));
  m.def(
      "vacuum_overlap",
      [](const Eigen::MatrixXcd& L, std::uint64_t n) {
        return gdf::coherent::vacuum_overlap(lambda_from(L), n);
      },
      py::arg("Lambda"), py::arg("n"));
  m.def(
      "overlap",
      [](const Eigen::MatrixXcd& L1, const Eigen::MatrixXcd& L2, std::uint64_t n) {
        return gdf::coherent::overlap(lambda_from(L1), lambda_from(L2), n);
      },
      py::arg("Lambda1"), py::arg("Lambda2"), py::arg("n"));
  m.def("q_density", &gdf::coherent::q_density, py::arg("x"), py::arg("y"), py::arg("n"));
  m.def(
      "sample_lambda",
      [](double eta, std::uint64_t n, std::uint64_t seed) {
        gdf::Rng rng = gdf::substream(seed, 0);
        return Eigen::MatrixXcd(gdf::coherent::sample_lambda(eta, n, rng).matrix());
      },
      py::arg("eta"), py::arg("n"), py::arg("seed"));
  m.def(
      "photon_block_weight",
      [](std::uint64_t K, std::uint64_t n, double x, double y) {
        return gdf::coherent::photon_block_weight(K, n, {x, y});
      },
      py::arg("K"), py::arg("n"), py::arg("x"), py::arg("y"));

  // symmetric subspace
  m.def("dim_V_eq", &gdf::subspace::dim_V_eq, py::arg("K"));
  m.def("dim_V_leq", &gdf::subspace::dim_V_leq, py::arg("K"));
  m.def("gram_matrix", &gdf::subspace::gram_matrix, py::arg("n"), py::arg("K"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "photon_block_via_gram",
      [](const Eigen::MatrixXcd& L, std::uint64_t n, std::uint32_t K) {
        return gdf::subspace::photon_block_via_gram(lambda_from(L), n, K);
      },
      py::arg("Lambda"), py::arg("n"), py::arg("K"));
  m.def(
      "verify_definetti",
      [](std::uint64_t n, std::uint32_t K, double eta, std::uint64_t samples,
         std::uint64_t seed, const std::string& estimator, unsigned threads) {
        const auto strategy = estimator == "direct"
                                  ? gdf::subspace::Sampling::Direct
                                  : gdf::subspace::Sampling::VacuumWeighted;
        gdf::subspace::DefinettiReport rep;
        {
          py::gil_scoped_release release;
          rep = gdf::subspace::verify_definetti(n, K, eta, samples, seed, strategy, threads);
        }
        py::dict d;
        d["n"] = rep.n;
        d["K"] = rep.K;
        d["eta"] = rep.eta;
        d["samples"] = rep.samples;
        d["seed"] = rep.seed;
        d["estimator"] = estimator;
        d["lambda_min"] = rep.lambda_min;
        d["lambda_max"] = rep.lambda_max;
        d["stderr_min"] = rep.stderr_min;
        d["stderr_max"] = rep.stderr_max;
        d["lambda_min_full"] = rep.lambda_min_full;
        d["lambda_max_full"] = rep.lambda_max_full;
        d["gram_condition"] = rep.gram_condition;
        d["eps_bound"] = log_real_dict(rep.eps_bound);
        d["eps_vacuous"] = rep.eps_vacuous;
        d["verdict_upper"] = rep.verdict_upper;
        d["verdict_lower"] = rep.verdict_lower;
        d["passed"] = rep.passed();
        return d;
      },
      py::arg("n"), py::arg("K"), py::arg("eta"), py::arg("samples"), py::arg("seed"),
      py::arg("estimator") = "weighted", py::arg("threads") = 0);

  // Fock oracle
  m.def("gram_oracle", &gdf::fock::gram_oracle, py::arg("n"), py::arg("K"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "truncated_overlap",
      [](const Eigen::MatrixXcd& L1, const Eigen::MatrixXcd& L2, std::uint32_t n,
         std::uint32_t max_total_photons) {
        return gdf::fock::truncated_overlap(lambda_from(L1), lambda_from(L2), n,
                                            max_total_photons);
      },
      py::arg("Lambda1"), py::arg("Lambda2"), py::arg("n"), py::arg("max_total_photons"));
  m.def("heterodyne_tail_eigenvalue", &gdf::fock::heterodyne_tail_eigenvalue, py::arg("m_total"),
        py::arg("n"), py::arg("d"));
  m.def(
      "verify_cutoff_domination",
      [](std::uint64_t n, double d, std::uint64_t M_max) {
        const auto rep = gdf::fock::verify_cutoff_domination(n, d, M_max);
        py::dict out;
        out["min_margin"] = rep.min_margin;
        out["argmin_M"] = rep.argmin_M;
        out["checked"] = rep.checked;
        out["all_positive"] = rep.all_positive;
        return out;
      },
      py::arg("n"), py::arg("d"), py::arg("M_max"));
  m.def(
      "invariance_check",
      [](std::uint32_t n, std::uint32_t i, std::uint32_t j, std::uint32_t k,
         std::uint32_t l, std::uint32_t trials, std::uint64_t seed) {
        gdf::Rng rng = gdf::substream(seed, 0);
        return gdf::fock::invariance_check(n, {i, j, k, l}, trials, rng);
      },
      py::arg("n"), py::arg("i"), py::arg("j"), py::arg("k"), py::arg("l"),
      py::arg("trials"), py::arg("seed"));

  // energy test
  m.def(
      "chi2_ratio_probability",
      [](std::uint64_t n, std::uint64_t k, double d, double eps, std::uint64_t trials,
         std::uint64_t seed) {
        gdf::energy::Chi2RatioReport rep;
        {
          py::gil_scoped_release release;
          rep = gdf::energy::chi2_ratio_probability(n, k, d, to_log_real(eps), trials, seed);
        }
        py::dict out;
        out["d"] = rep.d;
        out["d_prime"] = rep.d_prime;
        out["g"] = rep.g;
        out["rate"] = rep.estimate.rate;
        out["ci_low"] = rep.estimate.ci_low;
        out["ci_high"] = rep.estimate.ci_high;
        out["method"] = rep.method;
        out["analytic_bound"] = rep.analytic_bound;
        out["verdict"] = rep.verdict;
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("d"), py::arg("eps"), py::arg("trials"),
      py::arg("seed"));
  m.def(
      "failure_event_estimate",
      [](std::uint64_t n, std::uint64_t k, double d_A, double d_B, double mean_photons,
         const std::string& model, double eps_test, std::uint64_t trials,
         std::uint64_t seed) {
        gdf::energy::TestParams params;
        params.n = n;
        params.k = k;
        params.d_A = d_A;
        params.d_B = d_B;
        const auto mdl = model == "adversarial"
                             ? gdf::energy::EnergyModel::AdversarialConcentrated
                             : gdf::energy::EnergyModel::Thermal;
        gdf::energy::FailureReport rep;
        {
          py::gil_scoped_release release;
          rep = gdf::energy::failure_event_estimate(params, mean_photons, mean_photons, mdl,
                                                    to_log_real(eps_test), trials, seed);
        }
        py::dict out;
        out["dprime_A"] = rep.dprime_A;
        out["dprime_B"] = rep.dprime_B;
        out["rate"] = rep.joint.rate;
        out["ci_high"] = rep.joint.ci_high;
        out["pass_rate"] = rep.pass_rate;
        out["verdict"] = rep.verdict;
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("d_A"), py::arg("d_B"), py::arg("mean_photons"),
      py::arg("model"), py::arg("eps_test"), py::arg("trials"), py::arg("seed"));
}
