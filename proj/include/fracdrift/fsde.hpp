#pragma once

#include <functional>
#include <string>

#include "fracdrift/types.hpp"

namespace fracdrift::fsde {

struct ProbeSpec {
  double lo = -50.0;
  double hi = 50.0;
  std::size_t points = 10000;
};

// Dissipative drift b with derivatives. Construction verifies, on a dense
// probe grid, that b'(x) <= -M, that b is lip_norm-Lipschitz, and that the
// supplied derivatives match finite differences of the level below.
class DriftModel {
 public:
  using Fn = std::function<double(double)>;
  // (b(x + d) - b(x)) / d, usable down to d = 0 (where it must equal b'(x)).
  // Catalog models supply a cancellation-free implementation; the default
  // falls back to the naive quotient and switches to b' for small d.
  using SecantFn = std::function<double(double, double)>;

  DriftModel(std::string name, Fn b, Fn b_prime, Fn b_second,
             double dissipativity, double lip_norm, SecantFn secant = nullptr,
             ProbeSpec probe = {});

  double b(double x) const { return b_(x); }
  double b_prime(double x) const { return b_prime_(x); }
  double b_second(double x) const { return b_second_(x); }
  double secant(double x, double d) const { return secant_(x, d); }

  double dissipativity() const { return dissipativity_; }  // M
  double lip_norm() const { return lip_norm_; }
  double b_second_sup() const { return b_second_sup_; }  // sup |b''| on probe
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn b_, b_prime_, b_second_;
  SecantFn secant_;
  double dissipativity_;
  double lip_norm_;
  double b_second_sup_ = 0.0;
};

// b(x) = -lambda x. M = lambda, Lipschitz norm lambda, b'' = 0.
DriftModel linear_drift(double lambda);

// b(x) = -lambda x - a tanh(x). M = lambda, Lipschitz norm lambda + a;
// bounded derivatives of all orders, unlike polynomial nonlinearities.
DriftModel tanh_drift(double lambda, double a);

struct SdeConfig {
  DriftModel drift;
  double sigma;  // nonzero
  double x0;
  TimeGrid grid;
  HurstIndex hurst;
};

// Euler scheme for dX = b(X) dt + sigma dB. The noise enters additively, so
// only the drift term carries O(dt) bias.
Path solve_euler(const SdeConfig& cfg, const Path& noise);

// Two solutions driven by the identical noise from x0 and x0 + epsilon.
// The difference is tracked by its own recursion
//   D_{i+1} = D_i * (1 + dt * (b(X_i + D_i) - b(X_i)) / D_i)
// both in plain doubles and in log space: subtracting two separately evolved
// O(1) paths loses the difference entirely once eps * e^{-Mt} drops below
// the floating-point resolution of the states, which breaks every ratio
// the estimators need. log_rel_diff never underflows.
struct CoupledPaths {
  Path base;
  Path shifted;  // base + diff, entrywise
  double epsilon;
  SeedSpec noise_seed;
  std::vector<double> diff;          // plain-tracked difference (may underflow)
  std::vector<double> log_rel_diff;  // log(diff_i / epsilon), always finite

  double difference(std::size_t i) const { return diff[i]; }
};

// Couple a given solution path: purely a functional of the base path and
// the drift. Verifies the monotone-flow and contraction invariants
// (|D(t)| <= eps * e^{-Mt} * (1 + tol_disc), tol_disc = 10 * dt * lip_norm).
CoupledPaths couple_from(const Path& base, const DriftModel& drift,
                         double epsilon, SeedSpec noise_seed);

// Observed pair: the difference comes from subtracting the two columns, so
// it is only usable while eps * e^{-Mt} stays above the floating-point
// resolution of the states. The shifted column must stay strictly above
// the base everywhere.
CoupledPaths couple_from_observed(const Path& base, const Path& shifted);

CoupledPaths solve_coupled(const SdeConfig& cfg, double epsilon,
                           const Path& noise, SeedSpec noise_seed);

// Langevin dynamics dX = -lambda X dt + sigma dB started at 0 at time
// -burn_in with one contiguous fBm drive; the burn-in segment is discarded.
// Exponential forgetting at rate lambda bounds the initialization error by
// |x0 - X_stat| * e^{-lambda * burn_in}.
Path stationary_ou_path(double lambda, double sigma, const TimeGrid& grid,
                        const HurstIndex& hurst, SeedSpec seed,
                        double burn_in = 0.0 /* 0 => 10 / lambda */);

// Stationary base path plus a coupling started at t = 0 with offset epsilon.
CoupledPaths stationary_coupled_ou(double lambda, double sigma,
                                   const TimeGrid& grid,
                                   const HurstIndex& hurst, double epsilon,
                                   SeedSpec seed, double burn_in = 0.0);

}  // namespace fracdrift::fsde
