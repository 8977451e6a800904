#pragma once

#include <cstddef>
#include <vector>

namespace fracdrift::stats {

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased, n-1
double stddev(const std::vector<double>& xs);

// Biased (1/n) empirical autocorrelation at lags 0..max_lag; the 1/n
// normalization keeps the sequence nonnegative-definite. Switches to an FFT
// computation when the direct O(n * max_lag) loop is larger than the
// transform. demean = false treats the series as known-centered, which
// avoids the O(Var(mean)) downward bias that distorts long-memory tails.
std::vector<double> autocorrelation(const std::vector<double>& xs,
                                    std::size_t max_lag, bool demean = true);

// Two-sample Kolmogorov-Smirnov p-value (asymptotic Kolmogorov distribution
// with the usual finite-sample effective-size adjustment).
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n_used = 0;
};

OlsFit ols(const std::vector<double>& xs, const std::vector<double>& ys);

// Empirical quantiles (linear interpolation between order statistics).
std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs);

}  // namespace fracdrift::stats
