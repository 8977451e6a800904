#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "fracdrift/estimators.hpp"
#include "fracdrift/fsde.hpp"
#include "fracdrift/gaussdiag.hpp"
#include "fracdrift/harness.hpp"
#include "fracdrift/stats.hpp"

using namespace fracdrift;

TEST_CASE("hermite polynomials: explicit low orders and the recurrence") {
  using gaussdiag::hermite_poly;
  CHECK(hermite_poly(0, 3.7) == 1.0);
  CHECK(hermite_poly(1, 3.7) == 3.7);
  CHECK(hermite_poly(2, 0.0) == -1.0);       // y^2 - 1
  CHECK(hermite_poly(3, 2.0) == 2.0);        // y^3 - 3y at 2
  for (double y : {-1.7, 0.3, 2.9}) {
    CHECK(hermite_poly(4, y) ==
          doctest::Approx(y * y * y * y - 6.0 * y * y + 3.0).epsilon(1e-12));
    CHECK(hermite_poly(5, y) ==
          doctest::Approx(std::pow(y, 5) - 10.0 * y * y * y + 15.0 * y)
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(hermite_poly(51, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hermite_poly(-1, 0.0), std::invalid_argument);
}

TEST_CASE("gauss-hermite quadrature integrates the weight and orthogonality") {
  const auto gh = gaussdiag::gauss_hermite(64);
  double total = 0.0;
  for (double w : gh.weights) total += w;
  CHECK(total == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // E[H_3 H_2] = 0, E[H_3^2] = 3! = 6
  const double cross = gaussdiag::gauss_expectation([](double y) {
    return gaussdiag::hermite_poly(3, y) * gaussdiag::hermite_poly(2, y);
  });
  CHECK(std::abs(cross) < 1e-10);
  const double sq = gaussdiag::gauss_expectation([](double y) {
    const double v = gaussdiag::hermite_poly(3, y);
    return v * v;
  });
  CHECK(sq == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto gl = gaussdiag::gauss_legendre(16);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double y = gl.nodes[i];
    acc += gl.weights[i] * (5.0 * std::pow(y, 8) - y * y + 0.25);
  }
  // int_{-1}^{1} = 2 * (5/9 - 1/3 + 1/4)
  CHECK(acc == doctest::Approx(2.0 * (5.0 / 9.0 - 1.0 / 3.0 + 0.25))
                   .epsilon(1e-13));
}

TEST_CASE("kernel functional coefficients: rank one off the origin") {
  auto kernel = estimators::biweight_kernel();
  const double sigma0 = 0.79;
  // support of the window lies in (0, inf): J(1) > 0 and the rank is one
  const auto c = gaussdiag::hermite_coeffs_of_kernel_functional(kernel, 0.3,
                                                                1.0, sigma0);
  CHECK(c.j[0] == 0.0);
  CHECK(c.j[1] > 0.0);
  CHECK(c.hermite_rank == 1);
  // negative x mirrors the sign
  const auto cm = gaussdiag::hermite_coeffs_of_kernel_functional(kernel, 0.3,
                                                                 -1.0, sigma0);
  CHECK(cm.j[1] < 0.0);
  CHECK(cm.hermite_rank == 1);
  // sign(J1) = sign(x) holds across the bandwidth sweep, so rank one is
  // reached by every bandwidth this artifact uses
  for (double h : {1.0, 0.5, 0.2, 0.1}) {
    const auto cs = gaussdiag::hermite_coeffs_of_kernel_functional(kernel, h,
                                                                   1.0, sigma0);
    CHECK(cs.j[1] > 0.0);
    CHECK(cs.hermite_rank == 1);
  }
  // symmetric case x = 0: J(1) vanishes by odd symmetry
  const auto c0 = gaussdiag::hermite_coeffs_of_kernel_functional(kernel, 0.3,
                                                                 0.0, sigma0);
  CHECK(std::abs(c0.j[1]) < 1e-14);
  CHECK(c0.hermite_rank > 1);
}

TEST_CASE("parseval partial sums are monotone and bounded by E[G^2]") {
  auto kernel = estimators::biweight_kernel();
  const double sigma0 = 0.79, x = 0.5;
  for (double h : {0.5, 0.2, 0.1}) {
    const auto c =
        gaussdiag::hermite_coeffs_of_kernel_functional(kernel, h, x, sigma0, 12);
    double partial = 0.0, fact = 1.0, prev = 0.0;
    for (int q = 1; q <= c.q_max; ++q) {
      fact *= q;
      partial += c.j[q] * c.j[q] / fact;
      CHECK(partial >= prev);
      prev = partial;
    }
    CHECK(partial <= c.second_moment * (1.0 + 1e-6));
    // the asymptotic envelope 2||K||^2 ||nu||/(sigma0 h) + 2 R^2
    const double envelope =
        2.0 * kernel.sup_k * kernel.sup_k * gaussdiag::normal_density(0.0) /
            (sigma0 * h) +
        2.0 * c.r_tx * c.r_tx;
    CHECK(partial <= envelope);
  }
}

TEST_CASE("smoothed density converges to nu(x/sigma0)/sigma0 as h shrinks") {
  auto kernel = estimators::biweight_kernel();
  const double sigma0 = 0.79, x = 0.5;
  const double target = gaussdiag::normal_density(x / sigma0) / sigma0;
  double prev_err = 1e9;
  for (double h : {0.4, 0.2, 0.1}) {
    const auto c =
        gaussdiag::hermite_coeffs_of_kernel_functional(kernel, h, x, sigma0);
    const double err = std::abs(c.r_tx - target);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("mehler identity cells") {
  {
    const auto r = gaussdiag::mehler_check(1, 0.5, 100000, {5150, 1});
    CHECK(std::abs(r.empirical - 0.5) <= 5.0 * r.stderr_);
    CHECK(r.predicted == 0.5);
  }
  {
    const auto r = gaussdiag::mehler_check(2, 0.0, 100000, {5150, 2});
    CHECK(r.predicted == 0.0);
    CHECK(std::abs(r.empirical) <= 5.0 * r.stderr_);
  }
  {
    const auto r = gaussdiag::mehler_check(3, 0.8, 100000, {5150, 3});
    CHECK(r.predicted == doctest::Approx(3.072).epsilon(1e-12));
    CHECK(std::abs(r.empirical - r.predicted) <= 5.0 * r.stderr_);
  }
  CHECK_THROWS_AS(gaussdiag::mehler_check(2, 1.5, 100, {1, 1}),
                  std::invalid_argument);
}

TEST_CASE("autocorrelation double integral reductions") {
  using gaussdiag::autocorr_double_integral;
  const double horizon = 10.0, dt = 0.1;
  const std::size_t n = 100;
  {
    std::vector<double> white(n, 0.0);
    white[0] = 1.0;
    CHECK(autocorr_double_integral(white, horizon, dt) ==
          doctest::Approx(dt * horizon).epsilon(1e-12));
  }
  {
    std::vector<double> ones(n, 1.0);
    CHECK(autocorr_double_integral(ones, horizon, dt) ==
          doctest::Approx(horizon * horizon).epsilon(1e-12));
  }
  {
    std::vector<double> bad(n, 1.0);
    bad[0] = 0.9;
    CHECK_THROWS_AS(autocorr_double_integral(bad, horizon, dt),
                    std::invalid_argument);
    std::vector<double> short_arr(n / 2, 1.0);
    short_arr[0] = 1.0;
    CHECK_THROWS_AS(autocorr_double_integral(short_arr, horizon, dt),
                    std::invalid_argument);
  }
}

TEST_CASE("variance prediction chain for the kernel functional on fOU") {
  const HurstIndex h(0.7);
  const double lambda = 1.0, sigma = 1.0, x = 0.5, bw = 0.4;
  const double sigma0 =
      harness::stationary_std_oracle(lambda, sigma, h, 1e4, 0.05, 4);
  auto kernel = estimators::biweight_kernel();
  const auto coeffs =
      gaussdiag::hermite_coeffs_of_kernel_functional(kernel, bw, x, sigma0, 12);
  double parseval = 0.0, fact = 1.0;
  for (int q = 1; q <= coeffs.q_max; ++q) {
    fact *= q;
    parseval += coeffs.j[q] * coeffs.j[q] / fact;
  }
  const double horizon = 100.0;
  const TimeGrid grid(horizon, 2000);
  std::vector<double> tavg;
  std::vector<double> rho_acc(grid.n, 0.0);
  const std::size_t reps = 100;
  for (std::size_t r = 0; r < reps; ++r) {
    Path p = fsde::stationary_ou_path(lambda, sigma, grid, h, {611, r});
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      s += (kernel.k((p.values[i] - x) / bw) / bw - coeffs.r_tx) * grid.dt();
    }
    tavg.push_back(s / horizon);
    const auto rho = stats::autocorrelation(p.values, grid.n - 1);
    for (std::size_t k = 0; k < grid.n; ++k) rho_acc[k] += rho[k];
  }
  for (auto& v : rho_acc) v /= static_cast<double>(reps);
  rho_acc[0] = 1.0;
  const double big_i =
      gaussdiag::autocorr_double_integral(rho_acc, horizon, grid.dt());
  const double bound = big_i / (horizon * horizon) * parseval * 1.5;
  CHECK(stats::variance(tavg) <= bound);
}

TEST_CASE("fOU |rho| double integral grows no faster than 2^{2H} per doubling") {
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::autocorr;
  cfg.model = {"linear", 1.0, 1.0, 1.0, 0.7};
  cfg.delta = 0.05;
  cfg.horizons = {200.0};
  cfg.replications = 100;
  cfg.base_seed = 1007;
  const auto report = harness::run_experiment(cfg);
  CHECK(report.all_pass());
}
