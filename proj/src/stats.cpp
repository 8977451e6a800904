#include "fracdrift/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "fracdrift/fft.hpp"

namespace fracdrift::stats {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double stddev(const std::vector<double>& xs) { return std::sqrt(variance(xs)); }

std::vector<double> autocorrelation(const std::vector<double>& xs,
                                    std::size_t max_lag, bool demean) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("autocorrelation: series too short");
  if (max_lag >= n) max_lag = n - 1;
  const double m = demean ? mean(xs) : 0.0;

  std::vector<double> acov(max_lag + 1, 0.0);
  if (n * max_lag <= (1u << 22)) {
    for (std::size_t k = 0; k <= max_lag; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i + k < n; ++i) s += (xs[i] - m) * (xs[i + k] - m);
      acov[k] = s / static_cast<double>(n);
    }
  } else {
    // circular convolution on a zero-padded grid gives all lags at once
    std::size_t fft_n = std::bit_ceil(2 * n);
    std::vector<std::complex<double>> a(fft_n, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) a[i] = {xs[i] - m, 0.0};
    detail::fft_radix2(a, false);
    for (auto& z : a) z = z * std::conj(z);
    detail::fft_radix2(a, true);
    for (std::size_t k = 0; k <= max_lag; ++k) {
      acov[k] = a[k].real() / static_cast<double>(n);
    }
  }
  if (acov[0] <= 0.0) throw std::runtime_error("autocorrelation: zero variance");
  std::vector<double> rho(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) rho[k] = acov[k] / acov[0];
  rho[0] = 1.0;
  return rho;
}

namespace {

double ks_q(double lambda) {
  // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return ks_q((ne + 0.12 + 0.11 / ne) * d);
}

OlsFit ols(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("ols: need >= 2 matching points");
  }
  const std::size_t n = xs.size();
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("ols: degenerate abscissae");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += r * r;
  }
  fit.slope_stderr =
      n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  fit.n_used = n;
  return fit;
}

std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs) {
  if (values.empty()) throw std::invalid_argument("quantiles: empty input");
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(probs.size());
  const double n = static_cast<double>(values.size());
  for (double p : probs) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantiles: p out of range");
    const double pos = p * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(values[lo] * (1.0 - frac) + values[hi] * frac);
  }
  return out;
}

}  // namespace fracdrift::stats
