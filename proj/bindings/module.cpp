#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracdrift/estimators.hpp"
#include "fracdrift/fgn.hpp"
#include "fracdrift/fsde.hpp"
#include "fracdrift/gaussdiag.hpp"
#include "fracdrift/harness.hpp"
#include "fracdrift/integrals.hpp"
#include "fracdrift/stats.hpp"

namespace py = pybind11;
using namespace fracdrift;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> from_array(const py::array_t<double>& a) {
  const auto buf = a.request();
  const auto* ptr = static_cast<const double*>(buf.ptr);
  return std::vector<double>(ptr, ptr + buf.size);
}

Path make_path(double horizon, const py::array_t<double>& values) {
  auto v = from_array(values);
  if (v.size() < 3) throw std::invalid_argument("path needs >= 3 samples");
  const TimeGrid grid(horizon, v.size() - 1);
  return Path(grid, std::move(v));
}

fsde::DriftModel model_by_name(const std::string& name, double lambda,
                               double a) {
  if (name == "linear") return fsde::linear_drift(lambda);
  if (name == "tanh") return fsde::tanh_drift(lambda, a);
  throw std::invalid_argument("unknown model: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Simulation of additive-noise fractional SDEs and Nadaraya-Watson "
      "drift estimation";

  m.def(
      "fbm_covariance",
      [](double hurst, double s, double t) {
        return fgn::fbm_covariance(HurstIndex(hurst), s, t);
      },
      py::arg("hurst"), py::arg("s"), py::arg("t"),
      "Covariance (s^2H + t^2H - |t-s|^2H)/2 of fractional Brownian motion.");

  m.def(
      "sample_fbm",
      [](double hurst, double horizon, std::size_t steps, std::uint64_t seed,
         std::uint64_t stream, const std::string& method) {
        const HurstIndex h(hurst);
        const TimeGrid grid(horizon, steps);
        const SeedSpec s{seed, stream};
        Path p = method == "cholesky" ? fgn::sample_fgn_cholesky(h, grid, s)
                                      : fgn::sample_fgn_fft(h, grid, s);
        return to_array(p.values);
      },
      py::arg("hurst"), py::arg("horizon"), py::arg("steps"), py::arg("seed"),
      py::arg("stream") = 0, py::arg("method") = "fft",
      "One fBm path on the uniform grid; returns steps + 1 values, B(0) = 0.");

  m.def(
      "solve_euler",
      [](const std::string& model, double lambda, double a, double sigma,
         double x0, double hurst, double horizon, std::size_t steps,
         std::uint64_t seed, std::uint64_t stream) {
        const HurstIndex h(hurst);
        const TimeGrid grid(horizon, steps);
        Path noise = fgn::sample_fgn_fft(h, grid, {seed, stream});
        fsde::SdeConfig cfg{model_by_name(model, lambda, a), sigma, x0, grid, h};
        return to_array(fsde::solve_euler(cfg, noise).values);
      },
      py::arg("model"), py::arg("lambda_"), py::arg("a"), py::arg("sigma"),
      py::arg("x0"), py::arg("hurst"), py::arg("horizon"), py::arg("steps"),
      py::arg("seed"), py::arg("stream") = 0,
      "Euler solution of dX = b(X) dt + sigma dB driven by a fresh fBm path.");

  m.def(
      "solve_coupled",
      [](const std::string& model, double lambda, double a, double sigma,
         double x0, double hurst, double horizon, std::size_t steps,
         double epsilon, std::uint64_t seed, std::uint64_t stream) {
        const HurstIndex h(hurst);
        const TimeGrid grid(horizon, steps);
        Path noise = fgn::sample_fgn_fft(h, grid, {seed, stream});
        fsde::SdeConfig cfg{model_by_name(model, lambda, a), sigma, x0, grid, h};
        const auto cp = fsde::solve_coupled(cfg, epsilon, noise, {seed, stream});
        return py::make_tuple(to_array(cp.base.values),
                              to_array(cp.shifted.values),
                              to_array(cp.log_rel_diff));
      },
      py::arg("model"), py::arg("lambda_"), py::arg("a"), py::arg("sigma"),
      py::arg("x0"), py::arg("hurst"), py::arg("horizon"), py::arg("steps"),
      py::arg("epsilon"), py::arg("seed"), py::arg("stream") = 0,
      "Coupled pair from x0 and x0 + epsilon sharing one noise; returns "
      "(base, shifted, log((shifted-base)/epsilon)).");

  m.def(
      "stationary_ou_path",
      [](double lambda, double sigma, double hurst, double horizon,
         std::size_t steps, std::uint64_t seed, std::uint64_t stream,
         double burn_in) {
        const HurstIndex h(hurst);
        const TimeGrid grid(horizon, steps);
        return to_array(
            fsde::stationary_ou_path(lambda, sigma, grid, h, {seed, stream},
                                     burn_in)
                .values);
      },
      py::arg("lambda_"), py::arg("sigma"), py::arg("hurst"),
      py::arg("horizon"), py::arg("steps"), py::arg("seed"),
      py::arg("stream") = 0, py::arg("burn_in") = 0.0,
      "Stationary fractional Ornstein-Uhlenbeck path (burn-in discarded).");

  m.def(
      "young_integral",
      [](double horizon, const py::array_t<double>& integrand,
         const py::array_t<double>& integrator) {
        return integrals::young_integral(make_path(horizon, integrand),
                                         make_path(horizon, integrator));
      },
      py::arg("horizon"), py::arg("integrand"), py::arg("integrator"),
      "Left-point Riemann sum of the first path against the second.");

  m.def(
      "density_estimate",
      [](double horizon, const py::array_t<double>& path, double x, double h,
         const std::string& kernel) {
        return estimators::density_estimate(make_path(horizon, path), x, h,
                                            estimators::kernel_by_name(kernel));
      },
      py::arg("horizon"), py::arg("path"), py::arg("x"), py::arg("h"),
      py::arg("kernel") = "biweight",
      "Occupation-density estimate f_hat(x).");

  m.def(
      "pathwise_estimate",
      [](double horizon, const py::array_t<double>& path, double x, double h,
         const std::string& kernel) {
        const auto est = estimators::pathwise_estimate(
            make_path(horizon, path), x, h, estimators::kernel_by_name(kernel));
        return py::make_tuple(est.riemann, est.closed_form, est.f_hat,
                              est.degenerate);
      },
      py::arg("horizon"), py::arg("path"), py::arg("x"), py::arg("h"),
      py::arg("kernel") = "biweight",
      "Pathwise ratio estimator: (riemann, closed_form, f_hat, degenerate).");

  m.def(
      "drift_estimate_eps",
      [](double horizon, const py::array_t<double>& base,
         const std::string& model, double lambda, double a, double sigma,
         double hurst, double x, double h, double epsilon,
         const std::string& kernel) {
        Path base_path = make_path(horizon, base);
        const auto drift = model_by_name(model, lambda, a);
        const auto cp = fsde::couple_from(base_path, drift, epsilon, {0, 0});
        const auto est = estimators::drift_estimate_eps(
            cp, sigma, HurstIndex(hurst), x, h,
            estimators::kernel_by_name(kernel), epsilon, drift.dissipativity());
        return py::make_tuple(est.estimate, est.correction, est.f_hat,
                              est.degenerate);
      },
      py::arg("horizon"), py::arg("base"), py::arg("model"), py::arg("lambda_"),
      py::arg("a"), py::arg("sigma"), py::arg("hurst"), py::arg("x"),
      py::arg("h"), py::arg("epsilon"), py::arg("kernel") = "biweight",
      "Computable drift estimator on a coupled pair regenerated from the "
      "base path: (estimate, correction, f_hat, degenerate).");

  m.def(
      "drift_estimate_eps_observed",
      [](double horizon, const py::array_t<double>& base,
         const py::array_t<double>& shifted, double sigma, double hurst,
         double x, double h, const std::string& kernel) {
        const auto cp = fsde::couple_from_observed(make_path(horizon, base),
                                                   make_path(horizon, shifted));
        const auto est = estimators::drift_estimate_eps(
            cp, sigma, HurstIndex(hurst), x, h,
            estimators::kernel_by_name(kernel), cp.epsilon);
        return py::make_tuple(est.estimate, est.correction, est.f_hat,
                              est.degenerate);
      },
      py::arg("horizon"), py::arg("base"), py::arg("shifted"), py::arg("sigma"),
      py::arg("hurst"), py::arg("x"), py::arg("h"),
      py::arg("kernel") = "biweight",
      "Computable drift estimator on an observed pair of paths; the column "
      "difference must stay strictly positive over the horizon.");

  m.def(
      "drift_estimate_skorokhod",
      [](double horizon, const py::array_t<double>& path,
         const std::string& model, double lambda, double a, double sigma,
         double hurst, double x, double h, const std::string& kernel) {
        const auto est = estimators::drift_estimate_skorokhod(
            make_path(horizon, path), model_by_name(model, lambda, a), sigma,
            HurstIndex(hurst), x, h, estimators::kernel_by_name(kernel));
        return py::make_tuple(est.estimate, est.correction, est.f_hat,
                              est.bias_term, est.skorokhod_term,
                              est.degenerate);
      },
      py::arg("horizon"), py::arg("path"), py::arg("model"), py::arg("lambda_"),
      py::arg("a"), py::arg("sigma"), py::arg("hurst"), py::arg("x"),
      py::arg("h"), py::arg("kernel") = "biweight",
      "Oracle estimator using exp(int b') ratios: (estimate, correction, "
      "f_hat, bias_term, skorokhod_term, degenerate).");

  m.def(
      "schedule_eval",
      [](double horizon, double hurst) {
        const auto v = estimators::schedule_eval(
            estimators::BandwidthSchedule::paper(), horizon, HurstIndex(hurst));
        return py::make_tuple(v.h, v.epsilon);
      },
      py::arg("horizon"), py::arg("hurst"),
      "(h, epsilon) = (T^{(H-1)/3}, h^2).");

  m.def("hermite_poly", &gaussdiag::hermite_poly, py::arg("q"), py::arg("y"),
        "Probabilists' Hermite polynomial H_q(y).");

  m.def(
      "mehler_check",
      [](int q, double rho, std::size_t samples, std::uint64_t seed) {
        const auto r = gaussdiag::mehler_check(q, rho, samples, {seed, 0});
        return py::make_tuple(r.empirical, r.predicted, r.stderr_);
      },
      py::arg("q"), py::arg("rho"), py::arg("samples") = 100000,
      py::arg("seed") = 1,
      "(empirical, q! rho^q, stderr) for E[H_q(Z1) H_q(Z2)].");

  m.def(
      "stationary_std_oracle",
      [](double lambda, double sigma, double hurst, double horizon,
         double delta, std::size_t seeds) {
        return harness::stationary_std_oracle(lambda, sigma, HurstIndex(hurst),
                                              horizon, delta, seeds);
      },
      py::arg("lambda_"), py::arg("sigma"), py::arg("hurst"),
      py::arg("horizon") = 1e4, py::arg("delta") = 0.05, py::arg("seeds") = 10,
      "Long-run sample standard deviation of the stationary fractional OU.");

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        auto cfg = harness::parse_config_text(config_text);
        const auto rep = harness::run_experiment(cfg);
        py::dict out;
        out["kind"] = rep.kind;
        out["all_pass"] = rep.all_pass();
        out["verdict_table"] = harness::verdict_table(rep);
        out["rows_csv"] = harness::rows_csv(rep);
        out["report_hash"] = rep.report_hash;
        out["sigma0"] = rep.sigma0;
        return out;
      },
      py::arg("config_text"),
      "Run a Monte Carlo experiment from a flat key=value config string.");
}
