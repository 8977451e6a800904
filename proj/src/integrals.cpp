#include "fracdrift/integrals.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracdrift::integrals {

double young_integral(const Path& integrand, const Path& integrator) {
  if (integrand.grid != integrator.grid) {
    throw std::invalid_argument("young_integral: paths live on different grids");
  }
  const std::size_t n = integrand.grid.n;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += integrand.values[k] * (integrator.values[k + 1] - integrator.values[k]);
  }
  return acc;
}

double inner_kernel_integral(double u, double cell_lo, double cell_hi,
                             const HurstIndex& hurst) {
  if (!(cell_lo < cell_hi)) {
    throw std::invalid_argument("inner_kernel_integral: empty cell");
  }
  if (cell_lo < 0.0 || cell_hi > u) {
    throw std::invalid_argument(
        "inner_kernel_integral: cell must lie left of u within [0, u]");
  }
  const double p = 2.0 * hurst.value() - 1.0;
  return (std::pow(u - cell_lo, p) - std::pow(u - cell_hi, p)) / p;
}

RatioMode ratio_mode_by_name(const std::string& name) {
  if (name == "exact_linear") return RatioMode::exact_linear;
  if (name == "coupled") return RatioMode::coupled;
  if (name == "derivative") return RatioMode::derivative;
  throw std::invalid_argument("unknown ratio mode: " + name);
}

RatioPrefix ratio_prefix(const fsde::CoupledPaths& cp) {
  return {cp.log_rel_diff};
}

RatioPrefix ratio_prefix(const fsde::DriftModel& drift, const Path& x) {
  const std::size_t n = x.grid.n;
  const double dt = x.grid.dt();
  std::vector<double> pref(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = dt * drift.b_prime(x.values[i]);
    if (!(1.0 + step > 0.0)) {
      throw std::runtime_error(
          "ratio_prefix: dt * |b'| >= 1, step size too coarse at index " +
          std::to_string(i));
    }
    pref[i + 1] = pref[i] + std::log1p(step);
  }
  return {std::move(pref)};
}

RatioPrefix ratio_prefix_exact_linear(double lambda, const TimeGrid& grid) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ratio_prefix_exact_linear: lambda <= 0");
  }
  const double step = std::log1p(-lambda * grid.dt());
  if (!std::isfinite(step)) {
    throw std::invalid_argument("ratio_prefix_exact_linear: lambda * dt >= 1");
  }
  std::vector<double> pref(grid.n + 1);
  for (std::size_t i = 0; i <= grid.n; ++i) {
    pref[i] = static_cast<double>(i) * step;
  }
  return {std::move(pref)};
}

double correction_double_integral(const Path& phi_prime_on_path,
                                  const RatioPrefix& ratio,
                                  const CorrectionSpec& spec) {
  const std::size_t n = phi_prime_on_path.grid.n;
  if (ratio.log_prefix.size() != n + 1) {
    throw std::invalid_argument(
        "correction_double_integral: ratio prefix does not match the grid");
  }
  const double dt = phi_prime_on_path.grid.dt();
  const double p = 2.0 * spec.hurst.value() - 1.0;

  // cell integrals depend only on the lag on a uniform grid:
  // w[k] = int_{t_{i-k}}^{t_{i-k+1}} (t_i - v)^{2H-2} dv
  std::vector<double> w(n + 1, 0.0);
  const double dt_p = std::pow(dt, p);
  for (std::size_t k = 1; k <= n; ++k) {
    w[k] = dt_p *
           (std::pow(static_cast<double>(k), p) -
            std::pow(static_cast<double>(k - 1), p)) /
           p;
  }

  std::size_t window = n;
  if (spec.max_lag > 0) {
    window = std::min(spec.max_lag, n);
  } else if (spec.decay_rate > 0.0) {
    const double per_step = -std::log1p(-spec.decay_rate * dt);
    if (std::isfinite(per_step) && per_step > 0.0) {
      window = std::min<std::size_t>(
          n, static_cast<std::size_t>(std::ceil(46.0 / per_step)));
    }
  }

  const std::vector<double>& lp = ratio.log_prefix;
  const std::vector<double>& phip = phi_prime_on_path.values;
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double pi = phip[i];
    if (pi == 0.0) continue;
    const std::size_t jmin = i > window ? i - window : 0;
    const double li = lp[i];
    double inner = 0.0;
    for (std::size_t j = i; j-- > jmin;) {
      inner += std::exp(li - lp[j]) * w[i - j];
    }
    acc += pi * inner;
  }
  return acc * dt;
}

double skorokhod_correction(const Path& phi_prime_on_path,
                            const RatioPrefix& ratio,
                            const CorrectionSpec& spec) {
  if (spec.sigma == 0.0) {
    throw std::invalid_argument("skorokhod_correction: sigma must be nonzero");
  }
  return spec.alpha_h() * spec.sigma * spec.sigma *
         correction_double_integral(phi_prime_on_path, ratio, spec);
}

double skorokhod_correction(const Path& phi_prime_on_path,
                            const fsde::CoupledPaths& cp,
                            const CorrectionSpec& spec) {
  if (spec.mode != RatioMode::coupled) {
    throw std::invalid_argument(
        "skorokhod_correction: coupled paths require RatioMode::coupled");
  }
  return skorokhod_correction(phi_prime_on_path, ratio_prefix(cp), spec);
}

double skorokhod_correction(const Path& phi_prime_on_path,
                            const fsde::DriftModel& drift, const Path& x,
                            const CorrectionSpec& spec) {
  switch (spec.mode) {
    case RatioMode::derivative:
      return skorokhod_correction(phi_prime_on_path, ratio_prefix(drift, x),
                                  spec);
    case RatioMode::exact_linear:
      if (drift.name() != "linear") {
        throw std::invalid_argument(
            "skorokhod_correction: exact_linear mode is only valid for the "
            "linear catalog model");
      }
      return skorokhod_correction(
          phi_prime_on_path,
          ratio_prefix_exact_linear(drift.dissipativity(), x.grid), spec);
    default:
      throw std::invalid_argument(
          "skorokhod_correction: coupled mode needs the coupled-paths overload");
  }
}

double skorokhod_integral(const Path& phi_on_path,
                          const Path& phi_prime_on_path, const Path& x,
                          const RatioPrefix& ratio,
                          const CorrectionSpec& spec) {
  return young_integral(phi_on_path, x) -
         skorokhod_correction(phi_prime_on_path, ratio, spec);
}

double skorokhod_integral_vs_noise(const Path& phi_on_path,
                                   const Path& phi_prime_on_path,
                                   const Path& noise, const RatioPrefix& ratio,
                                   const CorrectionSpec& spec) {
  if (spec.sigma == 0.0) {
    throw std::invalid_argument(
        "skorokhod_integral_vs_noise: sigma must be nonzero");
  }
  return young_integral(phi_on_path, noise) -
         spec.alpha_h() * spec.sigma *
             correction_double_integral(phi_prime_on_path, ratio, spec);
}

}  // namespace fracdrift::integrals
