#pragma once

#include "fracdrift/types.hpp"

namespace fracdrift::fgn {

// Covariance of fractional Brownian motion:
//   (s^{2H} + t^{2H} - |t - s|^{2H}) / 2,  s, t >= 0.
double fbm_covariance(const HurstIndex& hurst, double s, double t);

// Autocovariance of the stationary increment sequence (fractional Gaussian
// noise) at integer lag k, for grid step dt:
//   gamma(k) = ((k+1)^{2H} - 2 k^{2H} + |k-1|^{2H}) / 2 * dt^{2H}.
double fgn_autocovariance(const HurstIndex& hurst, double dt, std::size_t lag);

// Exact sampler through a Cholesky factorization of the full path
// covariance. O(n^3) to factor, O(n^2) per draw; the slow oracle the FFT
// generator is checked against. Grid sizes above 4096 are rejected.
class FgnCholeskyPlan {
 public:
  FgnCholeskyPlan(const HurstIndex& hurst, const TimeGrid& grid);

  Path sample(SeedSpec seed) const;

  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  std::vector<double> lower_;  // n x n lower factor, row-major
};

Path sample_fgn_cholesky(const HurstIndex& hurst, const TimeGrid& grid,
                         SeedSpec seed);

// Circulant-embedding generator: increments are drawn as stationary
// fractional Gaussian noise through the eigenvalues of the 2m-periodic
// embedding of gamma(k), computed by FFT, then prefix-summed with B(0) = 0.
// Exact in law; O(n log n) per sample.
class FgnFftPlan {
 public:
  FgnFftPlan(const HurstIndex& hurst, const TimeGrid& grid);

  Path sample(SeedSpec seed) const;

  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  std::size_t padded_;  // power-of-two >= n; embedding size is 2 * padded_
  std::vector<double> amp_half_;  // sqrt(lambda_k / (2m)) for 0 < k < padded_
  double amp_zero_ = 0.0;         // sqrt(lambda_0 / m)
  double amp_mid_ = 0.0;          // sqrt(lambda_padded / m)
};

// One-shot convenience wrapper around FgnFftPlan.
Path sample_fgn_fft(const HurstIndex& hurst, const TimeGrid& grid,
                    SeedSpec seed);

}  // namespace fracdrift::fgn
