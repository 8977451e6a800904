#include "fracdrift/fsde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracdrift/fgn.hpp"

namespace fracdrift::fsde {

namespace {

double default_secant(const DriftModel::Fn& b, const DriftModel::Fn& b_prime,
                      double x, double d) {
  // below the switch the naive quotient is dominated by cancellation noise
  // while the linearization error ||b''|| d / 2 is still negligible
  const double floor = 1e-4 * (1.0 + std::abs(x));
  if (std::abs(d) < floor) return b_prime(x);
  return (b(x + d) - b(x)) / d;
}

}  // namespace

DriftModel::DriftModel(std::string name, Fn b, Fn b_prime, Fn b_second,
                       double dissipativity, double lip_norm, SecantFn secant,
                       ProbeSpec probe)
    : name_(std::move(name)),
      b_(std::move(b)),
      b_prime_(std::move(b_prime)),
      b_second_(std::move(b_second)),
      dissipativity_(dissipativity),
      lip_norm_(lip_norm) {
  if (!(dissipativity_ > 0.0)) {
    throw std::invalid_argument("DriftModel: dissipativity constant must be > 0");
  }
  if (!(lip_norm_ > 0.0)) {
    throw std::invalid_argument("DriftModel: Lipschitz bound must be > 0");
  }
  if (secant) {
    secant_ = std::move(secant);
  } else {
    secant_ = [b = b_, bp = b_prime_](double x, double d) {
      return default_secant(b, bp, x, d);
    };
  }

  const std::size_t pts = probe.points;
  if (pts < 2 || !(probe.hi > probe.lo)) {
    throw std::invalid_argument("DriftModel: bad probe grid");
  }
  const double step = (probe.hi - probe.lo) / static_cast<double>(pts - 1);
  double prev_b = 0.0;
  for (std::size_t i = 0; i < pts; ++i) {
    const double x = probe.lo + step * static_cast<double>(i);
    const double bx = b_(x);
    const double bpx = b_prime_(x);
    const double bsx = b_second_(x);

    if (bpx > -dissipativity_ + 1e-9 * std::max(1.0, dissipativity_)) {
      throw std::invalid_argument("DriftModel '" + name_ + "': b'(" +
                                  std::to_string(x) + ") = " +
                                  std::to_string(bpx) +
                                  " violates b' <= -M with M = " +
                                  std::to_string(dissipativity_));
    }
    if (i > 0 && std::abs(bx - prev_b) > lip_norm_ * step * (1.0 + 1e-8) + 1e-12) {
      throw std::invalid_argument("DriftModel '" + name_ +
                                  "': Lipschitz bound violated near x = " +
                                  std::to_string(x));
    }
    prev_b = bx;

    const double fd_step = 1e-5 * std::max(1.0, std::abs(x));
    const double fd1 = (b_(x + fd_step) - b_(x - fd_step)) / (2.0 * fd_step);
    if (std::abs(fd1 - bpx) > 1e-6 * std::max(1.0, std::abs(bpx))) {
      throw std::invalid_argument("DriftModel '" + name_ +
                                  "': b_prime does not match finite "
                                  "differences of b near x = " +
                                  std::to_string(x));
    }
    const double fd2 =
        (b_prime_(x + fd_step) - b_prime_(x - fd_step)) / (2.0 * fd_step);
    if (std::abs(fd2 - bsx) > 1e-6 * std::max(1.0, std::abs(bsx))) {
      throw std::invalid_argument("DriftModel '" + name_ +
                                  "': b_second does not match finite "
                                  "differences of b_prime near x = " +
                                  std::to_string(x));
    }
    b_second_sup_ = std::max(b_second_sup_, std::abs(bsx));

    if (i % 997 == 0) {
      // spot-check the secant against the quotient at a moderate offset
      const double d = 0.125;
      const double naive = (b_(x + d) - b_(x)) / d;
      if (std::abs(secant_(x, d) - naive) > 1e-6 * std::max(1.0, std::abs(naive))) {
        throw std::invalid_argument("DriftModel '" + name_ +
                                    "': secant disagrees with the difference "
                                    "quotient");
      }
      if (std::abs(secant_(x, 0.0) - bpx) > 1e-9 * std::max(1.0, std::abs(bpx))) {
        throw std::invalid_argument("DriftModel '" + name_ +
                                    "': secant(x, 0) must equal b'(x)");
      }
    }
  }
}

DriftModel linear_drift(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("linear_drift: lambda <= 0");
  return DriftModel(
      "linear", [lambda](double x) { return -lambda * x; },
      [lambda](double) { return -lambda; }, [](double) { return 0.0; }, lambda,
      lambda, [lambda](double, double) { return -lambda; });
}

namespace {

double stable_sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

DriftModel tanh_drift(double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 0.0)) {
    throw std::invalid_argument("tanh_drift: lambda and a must be > 0");
  }
  auto secant = [lambda, a](double x, double d) {
    // tanh(x+d) - tanh(x) = sinh(d) * sech(x) * sech(x+d); no cancellation
    double sinhc;  // sinh(d)/d
    if (std::abs(d) < 1e-4) {
      sinhc = 1.0 + d * d / 6.0;
    } else {
      sinhc = std::sinh(d) / d;
    }
    return -lambda - a * sinhc * stable_sech(x) * stable_sech(x + d);
  };
  return DriftModel(
      "tanh",
      [lambda, a](double x) { return -lambda * x - a * std::tanh(x); },
      [lambda, a](double x) {
        const double s = stable_sech(x);
        return -lambda - a * s * s;
      },
      [a](double x) {
        const double s = stable_sech(x);
        return 2.0 * a * std::tanh(x) * s * s;
      },
      lambda, lambda + a, secant);
}

Path solve_euler(const SdeConfig& cfg, const Path& noise) {
  if (noise.grid != cfg.grid) {
    throw std::invalid_argument("solve_euler: noise grid does not match");
  }
  // sigma = 0 is allowed here so the drift term can be checked against the
  // deterministic flow; estimation entry points reject it
  const std::size_t n = cfg.grid.n;
  const double dt = cfg.grid.dt();
  std::vector<double> x(n + 1);
  x[0] = cfg.x0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i + 1] = x[i] + cfg.drift.b(x[i]) * dt +
               cfg.sigma * (noise.values[i + 1] - noise.values[i]);
    if (!std::isfinite(x[i + 1])) {
      throw std::runtime_error("solve_euler: non-finite state at step " +
                               std::to_string(i + 1));
    }
  }
  return Path(cfg.grid, std::move(x));
}

namespace {

// Difference recursion shared by all coupling entry points. Fills diff and
// log_rel over [start, n] given diff(start) = epsilon.
void run_difference(const std::vector<double>& base, const DriftModel& drift,
                    double epsilon, double dt, std::size_t start,
                    std::vector<double>& diff, std::vector<double>& log_rel) {
  const std::size_t n = base.size() - 1;
  diff.assign(n + 1, 0.0);
  log_rel.assign(n + 1, 0.0);
  diff[start] = epsilon;
  log_rel[start] = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dq = drift.secant(base[i], diff[i]);
    const double fac = 1.0 + dt * dq;
    if (!(fac > 0.0)) {
      throw std::runtime_error(
          "coupling: step size too coarse for the drift's Lipschitz bound at "
          "step " +
          std::to_string(i));
    }
    diff[i + 1] = diff[i] * fac;
    log_rel[i + 1] = log_rel[i] + std::log1p(dt * dq);
    if (!std::isfinite(log_rel[i + 1])) {
      throw std::runtime_error("coupling: broken difference at step " +
                               std::to_string(i + 1));
    }
  }
}

void check_coupling_invariants(const CoupledPaths& cp, const DriftModel& drift) {
  const double dt = cp.base.grid.dt();
  const double tol_disc = 10.0 * dt * drift.lip_norm();
  const double m = drift.dissipativity();
  const double slack = std::log1p(tol_disc) + 1e-9;
  for (std::size_t i = 0; i < cp.log_rel_diff.size(); ++i) {
    const double t = cp.base.grid.time(i);
    if (cp.log_rel_diff[i] > -m * t + slack) {
      throw std::runtime_error(
          "coupling: contraction bound violated at step " + std::to_string(i) +
          " (signals a drift-model misconfiguration)");
    }
    // monotone flow: the tracked difference stays strictly positive unless
    // eps * e^{-Mt} has fallen beyond double range
    if (!(cp.diff[i] > 0.0) &&
        cp.log_rel_diff[i] + std::log(cp.epsilon) > -700.0) {
      throw std::runtime_error("coupling: difference lost at step " +
                               std::to_string(i));
    }
  }
}

}  // namespace

CoupledPaths couple_from(const Path& base, const DriftModel& drift,
                         double epsilon, SeedSpec noise_seed) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("couple_from: epsilon must be > 0");
  }
  std::vector<double> diff, log_rel;
  run_difference(base.values, drift, epsilon, base.grid.dt(), 0, diff, log_rel);
  std::vector<double> shifted(base.values.size());
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    shifted[i] = base.values[i] + diff[i];
  }
  CoupledPaths cp{base, Path(base.grid, std::move(shifted)), epsilon,
                  noise_seed, std::move(diff), std::move(log_rel)};
  check_coupling_invariants(cp, drift);
  return cp;
}

CoupledPaths couple_from_observed(const Path& base, const Path& shifted) {
  if (base.grid != shifted.grid) {
    throw std::invalid_argument("couple_from_observed: grids do not match");
  }
  const std::size_t n = base.grid.n;
  std::vector<double> diff(n + 1), log_rel(n + 1);
  const double epsilon = shifted.values[0] - base.values[0];
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument(
        "couple_from_observed: shifted(0) must exceed base(0)");
  }
  for (std::size_t i = 0; i <= n; ++i) {
    diff[i] = shifted.values[i] - base.values[i];
    if (!(diff[i] > 0.0)) {
      throw std::invalid_argument(
          "couple_from_observed: difference lost at index " +
          std::to_string(i) +
          "; the pair is only usable while it stays strictly positive");
    }
    log_rel[i] = std::log(diff[i] / epsilon);
  }
  return CoupledPaths{base,      shifted,        epsilon,
                      SeedSpec{}, std::move(diff), std::move(log_rel)};
}

CoupledPaths solve_coupled(const SdeConfig& cfg, double epsilon,
                           const Path& noise, SeedSpec noise_seed) {
  Path base = solve_euler(cfg, noise);
  return couple_from(base, cfg.drift, epsilon, noise_seed);
}

namespace {

struct ExtendedRun {
  Path extended;       // on [0, burn + T] in solver time
  std::size_t burn_steps;
};

ExtendedRun run_ou_extended(double lambda, double sigma, const TimeGrid& grid,
                            const HurstIndex& hurst, SeedSpec seed,
                            double burn_in) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ou: lambda must be > 0");
  if (sigma == 0.0) throw std::invalid_argument("ou: sigma must be nonzero");
  const double min_burn = 10.0 / lambda;
  if (burn_in == 0.0) burn_in = min_burn;
  if (burn_in < min_burn) {
    throw std::invalid_argument("ou: burn_in below the enforced 10 / lambda");
  }
  const double dt = grid.dt();
  const auto burn_steps =
      static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-12));
  const std::size_t total = grid.n + burn_steps;
  TimeGrid ext(dt * static_cast<double>(total), total);

  Path noise = fgn::FgnFftPlan(hurst, ext).sample(seed);
  SdeConfig cfg{linear_drift(lambda), sigma, 0.0, ext, hurst};
  return {solve_euler(cfg, noise), burn_steps};
}

}  // namespace

Path stationary_ou_path(double lambda, double sigma, const TimeGrid& grid,
                        const HurstIndex& hurst, SeedSpec seed,
                        double burn_in) {
  ExtendedRun run = run_ou_extended(lambda, sigma, grid, hurst, seed, burn_in);
  std::vector<double> values(run.extended.values.begin() +
                                 static_cast<long>(run.burn_steps),
                             run.extended.values.end());
  return Path(grid, std::move(values));
}

CoupledPaths stationary_coupled_ou(double lambda, double sigma,
                                   const TimeGrid& grid,
                                   const HurstIndex& hurst, double epsilon,
                                   SeedSpec seed, double burn_in) {
  ExtendedRun run = run_ou_extended(lambda, sigma, grid, hurst, seed, burn_in);
  std::vector<double> values(run.extended.values.begin() +
                                 static_cast<long>(run.burn_steps),
                             run.extended.values.end());
  Path base(grid, std::move(values));
  return couple_from(base, linear_drift(lambda), epsilon, seed);
}

}  // namespace fracdrift::fsde
