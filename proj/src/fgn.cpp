#include "fracdrift/fgn.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "fracdrift/fft.hpp"

namespace fracdrift::fgn {

double fbm_covariance(const HurstIndex& hurst, double s, double t) {
  if (s < 0.0 || t < 0.0) {
    throw std::invalid_argument("fbm_covariance: negative time argument");
  }
  const double two_h = 2.0 * hurst.value();
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) -
                std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(const HurstIndex& hurst, double dt, std::size_t lag) {
  if (!(dt > 0.0)) throw std::invalid_argument("fgn_autocovariance: dt <= 0");
  const double two_h = 2.0 * hurst.value();
  const double k = static_cast<double>(lag);
  const double unit =
      0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
             std::pow(std::abs(k - 1.0), two_h));
  return unit * std::pow(dt, two_h);
}

FgnCholeskyPlan::FgnCholeskyPlan(const HurstIndex& hurst, const TimeGrid& grid)
    : grid_(grid) {
  const std::size_t n = grid.n;
  if (n > 4096) {
    throw std::invalid_argument(
        "FgnCholeskyPlan: grid too large for an O(n^3) factorization "
        "(n <= 4096)");
  }
  // covariance of (B(t_1), ..., B(t_n)); B(0) = 0 is pinned
  std::vector<double>& c = lower_;
  c.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = fbm_covariance(hurst, grid.time(i + 1), grid.time(j + 1));
      c[i * n + j] = v;
      c[j * n + i] = v;
    }
  }
  // in-place lower Cholesky
  for (std::size_t j = 0; j < n; ++j) {
    double d = c[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= c[j * n + k] * c[j * n + k];
    if (!(d > 0.0)) {
      throw std::runtime_error(
          "FgnCholeskyPlan: covariance not positive definite at leading "
          "minor " +
          std::to_string(j + 1));
    }
    const double root = std::sqrt(d);
    c[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = c[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= c[i * n + k] * c[j * n + k];
      c[i * n + j] = s / root;
    }
  }
}

Path FgnCholeskyPlan::sample(SeedSpec seed) const {
  const std::size_t n = grid_.n;
  Rng rng(seed);
  std::vector<double> z(n);
  for (auto& g : z) g = rng.gaussian();
  std::vector<double> values(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += lower_[i * n + k] * z[k];
    values[i + 1] = s;
  }
  return Path(grid_, std::move(values));
}

Path sample_fgn_cholesky(const HurstIndex& hurst, const TimeGrid& grid,
                         SeedSpec seed) {
  return FgnCholeskyPlan(hurst, grid).sample(seed);
}

FgnFftPlan::FgnFftPlan(const HurstIndex& hurst, const TimeGrid& grid)
    : grid_(grid), padded_(std::bit_ceil(grid.n)) {
  const std::size_t m = 2 * padded_;
  const double dt = grid.dt();

  // first row of the symmetric circulant embedding of gamma
  std::vector<std::complex<double>> c(m, {0.0, 0.0});
  for (std::size_t j = 0; j <= padded_; ++j) {
    c[j] = {fgn_autocovariance(hurst, dt, j), 0.0};
  }
  for (std::size_t j = padded_ + 1; j < m; ++j) c[j] = c[m - j];

  detail::fft_radix2(c, false);

  double max_eig = 0.0;
  for (const auto& z : c) max_eig = std::max(max_eig, z.real());
  // for H > 1/2 the embedding is expected nonnegative definite; eigenvalues
  // below -eps_eig indicate a genuine bug rather than rounding noise
  const double eps_eig = 1e-12 * max_eig;

  amp_half_.resize(padded_);
  const double md = static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    double lam = c[k].real();
    if (lam < 0.0) {
      if (lam < -eps_eig) {
        throw std::runtime_error(
            "FgnFftPlan: circulant eigenvalue " + std::to_string(k) + " is " +
            std::to_string(lam) + ", below the clamp threshold");
      }
      lam = 0.0;
    }
    if (k == 0) {
      amp_zero_ = std::sqrt(lam / md);
    } else if (k == padded_) {
      amp_mid_ = std::sqrt(lam / md);
    } else if (k < padded_) {
      amp_half_[k] = std::sqrt(lam / (2.0 * md));
    }
  }
}

Path FgnFftPlan::sample(SeedSpec seed) const {
  const std::size_t m = 2 * padded_;
  Rng rng(seed);
  std::vector<std::complex<double>> w(m);
  w[0] = {amp_zero_ * rng.gaussian(), 0.0};
  for (std::size_t k = 1; k < padded_; ++k) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    w[k] = {amp_half_[k] * re, amp_half_[k] * im};
    w[m - k] = std::conj(w[k]);
  }
  w[padded_] = {amp_mid_ * rng.gaussian(), 0.0};

  detail::fft_radix2(w, false);

  const std::size_t n = grid_.n;
  std::vector<double> values(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    values[i + 1] = values[i] + w[i].real();
  }
  return Path(grid_, std::move(values));
}

Path sample_fgn_fft(const HurstIndex& hurst, const TimeGrid& grid,
                    SeedSpec seed) {
  return FgnFftPlan(hurst, grid).sample(seed);
}

}  // namespace fracdrift::fgn
