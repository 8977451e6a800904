#include "fracdrift/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracdrift/gaussdiag.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift::estimators {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Kernel biweight_kernel() {
  Kernel k;
  k.name = "biweight";
  k.k = [](double y) {
    if (std::abs(y) > 1.0) return 0.0;
    const double u = 1.0 - y * y;
    return 15.0 / 16.0 * u * u;
  };
  k.k_prime = [](double y) {
    if (std::abs(y) > 1.0) return 0.0;
    return -15.0 / 4.0 * y * (1.0 - y * y);
  };
  k.k_primitive = [](double y) {
    if (y <= -1.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return 15.0 / 16.0 * (y - 2.0 * y * y * y / 3.0 + y * y * y * y * y / 5.0) +
           0.5;
  };
  k.sup_k = 15.0 / 16.0;
  k.sup_k_prime = 15.0 / 4.0 * (1.0 / std::sqrt(3.0)) * (2.0 / 3.0);
  validate_kernel(k);
  return k;
}

Kernel cosine_kernel() {
  Kernel k;
  k.name = "cosine";
  k.k = [](double y) {
    if (std::abs(y) > 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI * y));
  };
  k.k_prime = [](double y) {
    if (std::abs(y) > 1.0) return 0.0;
    return -0.5 * M_PI * std::sin(M_PI * y);
  };
  k.k_primitive = [](double y) {
    if (y <= -1.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return 0.5 * (y + 1.0) + std::sin(M_PI * y) / (2.0 * M_PI);
  };
  k.sup_k = 1.0;
  k.sup_k_prime = 0.5 * M_PI;
  validate_kernel(k);
  return k;
}

Kernel kernel_by_name(const std::string& name) {
  if (name == "biweight") return biweight_kernel();
  if (name == "cosine") return cosine_kernel();
  throw std::invalid_argument("unknown kernel: " + name);
}

void validate_kernel(const Kernel& kernel) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("kernel '" + kernel.name + "': " + what);
  };
  // support exactly [-1, 1]
  for (double y : {1.0 + 1e-9, -1.0 - 1e-9, 2.0, -5.0}) {
    if (kernel.k(y) != 0.0) fail("support leaks outside [-1, 1]");
  }
  if (kernel.k(1.0 - 1e-9) < 0.0 || kernel.k(-1.0 + 1e-9) < 0.0) {
    fail("negative near the support edge");
  }
  // C^1 across the support boundary
  if (std::abs(kernel.k_prime(1.0)) > 1e-9 ||
      std::abs(kernel.k_prime(-1.0)) > 1e-9) {
    fail("K' must vanish at the support edges (kernel is not C^1)");
  }
  // unit integral, nonnegativity, derivative consistency on a probe grid
  const auto gl = gaussdiag::gauss_legendre(64);
  double integral = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    integral += gl.weights[i] * kernel.k(gl.nodes[i]);
  }
  if (std::abs(integral - 1.0) > 1e-8) fail("integral differs from 1");
  for (int i = -999; i <= 999; ++i) {
    const double y = static_cast<double>(i) / 1000.0;
    if (kernel.k(y) < 0.0) fail("negative value inside the support");
    const double fd = (kernel.k(y + 1e-6) - kernel.k(y - 1e-6)) / 2e-6;
    if (std::abs(fd - kernel.k_prime(y)) > 1e-6 * std::max(1.0, std::abs(fd))) {
      fail("K' does not match finite differences of K");
    }
    const double fdp =
        (kernel.k_primitive(y + 1e-6) - kernel.k_primitive(y - 1e-6)) / 2e-6;
    if (std::abs(fdp - kernel.k(y)) > 1e-6 * std::max(1.0, std::abs(fdp))) {
      fail("primitive does not match K");
    }
  }
  if (std::abs(kernel.k_primitive(-1.0)) > 1e-12 ||
      std::abs(kernel.k_primitive(1.0) - 1.0) > 1e-8) {
    fail("primitive must run from 0 at -1 to 1 at +1");
  }
}

BandwidthSchedule BandwidthSchedule::paper() {
  BandwidthSchedule s;
  s.h_rule = HRule::paper_power;
  s.eps_rule = EpsRule::squared_bandwidth;
  return s;
}

BandwidthSchedule BandwidthSchedule::fixed(double h, double eps) {
  if (!(h > 0.0)) throw std::invalid_argument("fixed schedule: h <= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("fixed schedule: eps <= 0");
  BandwidthSchedule s;
  s.h_rule = HRule::fixed;
  s.h_fixed = h;
  s.eps_rule = EpsRule::fixed;
  s.eps_fixed = eps;
  return s;
}

ScheduleValues schedule_eval(const BandwidthSchedule& schedule, double horizon,
                             const HurstIndex& hurst) {
  ScheduleValues v{};
  if (schedule.h_rule == BandwidthSchedule::HRule::fixed) {
    v.h = schedule.h_fixed;
  } else {
    if (!(horizon > 1.0)) {
      throw std::invalid_argument(
          "schedule_eval: the power schedule needs T > 1 (h would reach 1)");
    }
    v.h = std::pow(horizon, (hurst.value() - 1.0) / 3.0);
  }
  if (schedule.eps_rule == BandwidthSchedule::EpsRule::fixed) {
    v.epsilon = schedule.eps_fixed;
  } else {
    v.epsilon = v.h * v.h;
  }
  return v;
}

double degeneracy_threshold(double h) { return 1e-3 / h; }

namespace {

struct KernelSums {
  Path phi;        // K((X - x)/h) along the path
  Path phi_prime;  // K'((X - x)/h) / h along the path
  double occupation;  // sum K * dt = T h f_hat
  double f_hat;
};

KernelSums kernel_sums(const Path& x_path, double x, double h,
                       const Kernel& kernel) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  const std::size_t n = x_path.grid.n;
  const double dt = x_path.grid.dt();
  std::vector<double> phi(n + 1), phip(n + 1);
  double occ = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = (x_path.values[i] - x) / h;
    phi[i] = kernel.k(y);
    phip[i] = kernel.k_prime(y) / h;
    if (i < n) occ += phi[i] * dt;
  }
  const double f_hat = occ / (x_path.grid.horizon * h);
  return {Path(x_path.grid, std::move(phi)), Path(x_path.grid, std::move(phip)),
          occ, f_hat};
}

}  // namespace

double density_estimate(const Path& x_path, double x, double h,
                        const Kernel& kernel) {
  if (!(h > 0.0)) throw std::invalid_argument("density_estimate: h <= 0");
  const std::size_t n = x_path.grid.n;
  const double dt = x_path.grid.dt();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += kernel.k((x_path.values[i] - x) / h) * dt;
  }
  return acc / (x_path.grid.horizon * h);
}

PathwiseEstimate pathwise_estimate(const Path& x_path, double x, double h,
                                   const Kernel& kernel) {
  KernelSums s = kernel_sums(x_path, x, h, kernel);
  PathwiseEstimate out;
  out.f_hat = s.f_hat;
  if (s.f_hat < degeneracy_threshold(h)) {
    out.degenerate = true;
    out.riemann = kNan;
    out.closed_form = kNan;
    return out;
  }
  out.riemann = integrals::young_integral(s.phi, x_path) / s.occupation;
  const double prim_t = kernel.k_primitive((x_path.back() - x) / h);
  const double prim_0 = kernel.k_primitive((x_path.front() - x) / h);
  out.closed_form = h * (prim_t - prim_0) / s.occupation;
  return out;
}

DriftEstimate drift_estimate_eps(const fsde::CoupledPaths& paths, double sigma,
                                 const HurstIndex& hurst, double x, double h,
                                 const Kernel& kernel, double epsilon,
                                 double decay_rate) {
  if (sigma == 0.0) {
    throw std::invalid_argument("drift_estimate_eps: sigma must be nonzero");
  }
  if (epsilon != paths.epsilon) {
    throw std::invalid_argument(
        "drift_estimate_eps: epsilon does not match the coupled pair");
  }
  KernelSums s = kernel_sums(paths.base, x, h, kernel);
  DriftEstimate out;
  out.f_hat = s.f_hat;
  if (s.f_hat < degeneracy_threshold(h)) {
    out.degenerate = true;
    out.estimate = kNan;
    out.correction = kNan;
    out.pathwise_numerator = kNan;
    return out;
  }
  integrals::CorrectionSpec spec{hurst, sigma, integrals::RatioMode::coupled,
                                 decay_rate, 0};
  out.pathwise_numerator = integrals::young_integral(s.phi, paths.base);
  out.correction = integrals::skorokhod_correction(s.phi_prime, paths, spec);
  out.estimate = (out.pathwise_numerator - out.correction) / s.occupation;
  return out;
}

DriftEstimateDiag drift_estimate_skorokhod(const Path& x_path,
                                           const fsde::DriftModel& drift,
                                           double sigma,
                                           const HurstIndex& hurst, double x,
                                           double h, const Kernel& kernel) {
  if (sigma == 0.0) {
    throw std::invalid_argument(
        "drift_estimate_skorokhod: sigma must be nonzero");
  }
  KernelSums s = kernel_sums(x_path, x, h, kernel);
  DriftEstimateDiag out;
  out.f_hat = s.f_hat;
  if (s.f_hat < degeneracy_threshold(h)) {
    out.degenerate = true;
    out.estimate = kNan;
    out.correction = kNan;
    out.bias_term = kNan;
    out.skorokhod_term = kNan;
    return out;
  }
  integrals::CorrectionSpec spec{hurst, sigma, integrals::RatioMode::derivative,
                                 drift.dissipativity(), 0};
  const double young = integrals::young_integral(s.phi, x_path);
  out.correction = integrals::skorokhod_correction(
      s.phi_prime, integrals::ratio_prefix(drift, x_path), spec);
  out.estimate = (young - out.correction) / s.occupation;

  // decomposition diagnostics on the same discrete sums, so the identity
  // b_hat - b(x) = B/f_hat + S/f_hat holds to rounding
  const std::size_t n = x_path.grid.n;
  const double dt = x_path.grid.dt();
  const double th = x_path.grid.horizon * h;
  const double bx = drift.b(x);
  double bias_sum = 0.0;
  double noise_sum = 0.0;  // sum phi_i (dX_i - b(X_i) dt) = sigma * sum phi_i dB_i
  for (std::size_t i = 0; i < n; ++i) {
    const double bi = drift.b(x_path.values[i]);
    bias_sum += s.phi.values[i] * (bi - bx) * dt;
    noise_sum += s.phi.values[i] *
                 (x_path.values[i + 1] - x_path.values[i] - bi * dt);
  }
  out.bias_term = bias_sum / th;
  out.skorokhod_term = (noise_sum - out.correction) / th;
  return out;
}

EstimatorOutput estimate_profile(const fsde::CoupledPaths& paths, double sigma,
                                 const HurstIndex& hurst,
                                 const std::vector<double>& x_grid, double h,
                                 double epsilon, const Kernel& kernel,
                                 double decay_rate) {
  EstimatorOutput out;
  out.x_grid = x_grid;
  out.h_used = h;
  out.eps_used = epsilon;
  out.horizon_used = paths.base.grid.horizon;
  for (double x : x_grid) {
    PathwiseEstimate pw = pathwise_estimate(paths.base, x, h, kernel);
    DriftEstimate de =
        drift_estimate_eps(paths, sigma, hurst, x, h, kernel, epsilon, decay_rate);
    out.f_hat.push_back(de.f_hat);
    out.b_tilde.push_back(pw.degenerate ? kNan : pw.riemann);
    out.b_hat_eps.push_back(de.estimate);
    out.correction.push_back(de.correction);
    out.degenerate_mask.push_back(de.degenerate || pw.degenerate);
  }
  return out;
}

std::vector<double> default_x_grid(const Path& calibration,
                                   std::size_t points) {
  if (points < 1) throw std::invalid_argument("default_x_grid: no points");
  std::vector<double> probs;
  probs.reserve(points);
  for (std::size_t i = 1; i <= points; ++i) {
    probs.push_back(static_cast<double>(i) /
                    static_cast<double>(points + 1));
  }
  return stats::quantiles(calibration.values, probs);
}

}  // namespace fracdrift::estimators
