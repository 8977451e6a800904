#include <cmath>
#include <stdexcept>
#include <cstring>
#include <vector>

#include "doctest.h"

#include "fracdrift/fgn.hpp"
#include "fracdrift/stats.hpp"

using namespace fracdrift;

TEST_CASE("hurst index domain guard") {
  CHECK_NOTHROW(HurstIndex(0.7));
  CHECK_NOTHROW(HurstIndex(0.51));
  CHECK_THROWS_AS(HurstIndex(0.5), std::invalid_argument);
  CHECK_THROWS_AS(HurstIndex(1.0), std::invalid_argument);
  CHECK_THROWS_AS(HurstIndex(0.3), std::invalid_argument);
  CHECK_THROWS_AS(HurstIndex(1.2), std::invalid_argument);
}

TEST_CASE("fbm covariance closed form") {
  // Brownian limit: cov(1, 2) -> min = 1
  CHECK(fgn::fbm_covariance(HurstIndex(0.5 + 1e-12), 1.0, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // variance t^{2H} at t = 1 is 1 for every H
  for (double h : {0.55, 0.7, 0.9}) {
    CHECK(fgn::fbm_covariance(HurstIndex(h), 1.0, 1.0) == doctest::Approx(1.0));
  }
  // H = 0.75: (1 + 2^1.5 - 1)/2 = sqrt(2)
  CHECK(fgn::fbm_covariance(HurstIndex(0.75), 1.0, 2.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // symmetry
  const HurstIndex h(0.65);
  CHECK(fgn::fbm_covariance(h, 0.3, 1.7) == fgn::fbm_covariance(h, 1.7, 0.3));
  CHECK_THROWS_AS(fgn::fbm_covariance(h, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fgn::fbm_covariance(h, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("cholesky sampler determinism and size guard") {
  const HurstIndex h(0.7);
  const TimeGrid grid(1.0, 64);
  Path a = fgn::sample_fgn_cholesky(h, grid, {123, 9});
  Path b = fgn::sample_fgn_cholesky(h, grid, {123, 9});
  CHECK(std::memcmp(a.values.data(), b.values.data(),
                    a.values.size() * sizeof(double)) == 0);
  Path c = fgn::sample_fgn_cholesky(h, grid, {123, 10});
  CHECK(a.values[5] != c.values[5]);
  CHECK(a.values[0] == 0.0);
  CHECK_THROWS_AS(fgn::sample_fgn_cholesky(h, TimeGrid(1.0, 8192), {1, 0}),
                  std::invalid_argument);
}

TEST_CASE("cholesky sampler: Brownian-limit variance of B(T)") {
  // near the H = 1/2 boundary the path is Brownian and Var[B(1)] = 1
  const HurstIndex h(0.5 + 1e-9);
  const TimeGrid grid(1.0, 1024);
  const fgn::FgnCholeskyPlan plan(h, grid);
  const std::size_t reps = 10000;
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const double end = plan.sample({2024, r}).back();
    sum_sq += end * end;
  }
  const double var = sum_sq / static_cast<double>(reps);
  const double se = std::sqrt(2.0 / static_cast<double>(reps));  // Var[B(1)^2] = 2
  CHECK(std::abs(var - 1.0) <= 4.0 * se);
}

TEST_CASE("cholesky sampler: empirical covariance matches the closed form") {
  const HurstIndex h(0.7);
  const TimeGrid grid(1.0, 256);
  const fgn::FgnCholeskyPlan plan(h, grid);
  const std::size_t reps = 10000;
  const std::size_t m = grid.n + 1;
  std::vector<double> acc(m * m, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    Path p = plan.sample({52, r});
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t j = 1; j <= i; ++j) {
        acc[i * m + j] += p.values[i] * p.values[j];
      }
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 1; j <= i; ++j) {
      const double emp = acc[i * m + j] / static_cast<double>(reps);
      const double thy = fgn::fbm_covariance(h, grid.time(i), grid.time(j));
      const double se = std::sqrt(
          (fgn::fbm_covariance(h, grid.time(i), grid.time(i)) *
               fgn::fbm_covariance(h, grid.time(j), grid.time(j)) +
           thy * thy) /
          static_cast<double>(reps));
      worst = std::max(worst, std::abs(emp - thy) / se);
    }
  }
  CHECK(worst < 5.0);
}

TEST_CASE("fft sampler determinism") {
  const HurstIndex h(0.7);
  const TimeGrid grid(2.0, 300);  // non-power-of-two on purpose
  Path a = fgn::sample_fgn_fft(h, grid, {7, 3});
  Path b = fgn::sample_fgn_fft(h, grid, {7, 3});
  CHECK(std::memcmp(a.values.data(), b.values.data(),
                    a.values.size() * sizeof(double)) == 0);
  CHECK(a.values[0] == 0.0);
}

TEST_CASE("fft sampler: increment autocovariance matches gamma(k)") {
  const HurstIndex h(0.7);
  const TimeGrid grid(1.0, 512);
  fgn::FgnFftPlan plan(h, grid);
  const std::size_t reps = 10000;
  const std::size_t max_lag = 10;
  // per-replication autocovariance estimates, aggregated across reps so the
  // standard error comes from independent samples
  std::vector<double> sum(max_lag + 1, 0.0), sum_sq(max_lag + 1, 0.0);
  std::vector<double> incr(grid.n);
  for (std::size_t r = 0; r < reps; ++r) {
    Path p = plan.sample({31337, r});
    for (std::size_t i = 0; i < grid.n; ++i) {
      incr[i] = p.values[i + 1] - p.values[i];
    }
    for (std::size_t k = 0; k <= max_lag; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i + k < grid.n; ++i) s += incr[i] * incr[i + k];
      const double est = s / static_cast<double>(grid.n - k);
      sum[k] += est;
      sum_sq[k] += est * est;
    }
  }
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const double mean = sum[k] / static_cast<double>(reps);
    const double var = sum_sq[k] / static_cast<double>(reps) - mean * mean;
    const double se = std::sqrt(var / static_cast<double>(reps));
    const double thy = fgn::fgn_autocovariance(h, grid.dt(), k);
    CHECK(std::abs(mean - thy) <= 5.0 * se);
  }
}

TEST_CASE("fft sampler: white-noise increments at the Brownian limit") {
  const HurstIndex h(0.5 + 1e-9);
  const TimeGrid grid(1.0, 512);
  fgn::FgnFftPlan plan(h, grid);
  const std::size_t reps = 200;
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    Path p = plan.sample({99, r});
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
      const double a = p.values[i + 1] - p.values[i];
      const double b = p.values[i + 2] - p.values[i + 1];
      num += a * b;
      den += a * a;
    }
  }
  const double rho1 = num / den;
  CHECK(std::abs(rho1) < 4.0 / std::sqrt(static_cast<double>(grid.n * reps)));
}

TEST_CASE("fft vs cholesky marginal law of B(T)") {
  const HurstIndex h(0.7);
  const TimeGrid grid(1.0, 64);
  fgn::FgnFftPlan plan(h, grid);
  const fgn::FgnCholeskyPlan chol(h, grid);
  std::vector<double> a, b;
  for (std::size_t r = 0; r < 2000; ++r) {
    a.push_back(plan.sample({31, r}).back());
    b.push_back(chol.sample({32, r}).back());
  }
  CHECK(stats::ks_two_sample_pvalue(a, b) > 0.01);
}

TEST_CASE("self-similarity of the law: B(ct)/c^H") {
  const HurstIndex h(0.7);
  const TimeGrid g1(1.0, 128), g4(4.0, 128);
  fgn::FgnFftPlan p1(h, g1), p4(h, g4);
  const std::size_t reps = 10000;
  std::vector<double> v1(129, 0.0), v4(129, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    Path a = p1.sample({5, r});
    Path b = p4.sample({6, r});
    for (std::size_t i = 0; i <= 128; ++i) {
      v1[i] += a.values[i] * a.values[i];
      v4[i] += b.values[i] * b.values[i];
    }
  }
  const double scale = std::pow(4.0, 2.0 * h.value());
  for (std::size_t i = 1; i <= 128; ++i) {
    const double var1 = v1[i] / static_cast<double>(reps);
    const double var4 = v4[i] / static_cast<double>(reps) / scale;
    // independent estimates of one variance: se of the difference
    const double se =
        var1 * std::sqrt(2.0 / static_cast<double>(reps)) * std::sqrt(2.0);
    CHECK(std::abs(var4 - var1) <= 5.0 * se);
  }
}

TEST_CASE("increment stationarity across windows") {
  const HurstIndex h(0.7);
  const TimeGrid grid(1.0, 64);
  fgn::FgnFftPlan plan(h, grid);
  std::vector<double> w1, w2;
  for (std::size_t r = 0; r < 2000; ++r) {
    w1.push_back(plan.sample({21, r}).values[16]);  // B(0.25) - B(0)
    Path p = plan.sample({22, r});
    w2.push_back(p.values[48] - p.values[32]);  // B(0.75) - B(0.5)
  }
  CHECK(stats::ks_two_sample_pvalue(w1, w2) > 0.01);
}
