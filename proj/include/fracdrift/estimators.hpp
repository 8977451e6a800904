#pragma once

#include <functional>
#include <string>

#include "fracdrift/fsde.hpp"
#include "fracdrift/integrals.hpp"
#include "fracdrift/types.hpp"

namespace fracdrift::estimators {

// Compactly supported C^1 kernel: supp K = [-1, 1], K >= 0, int K = 1,
// K'(-1) = K'(1) = 0. The primitive is pinned to K_prim(y) = int_{-1}^y K
// so the closed-form pathwise route is bit-stable.
struct Kernel {
  std::string name;
  std::function<double(double)> k;
  std::function<double(double)> k_prime;
  std::function<double(double)> k_primitive;
  double sup_k = 0.0;
  double sup_k_prime = 0.0;
};

// (15/16) (1 - y^2)^2 on [-1, 1].
Kernel biweight_kernel();
// (1 + cos(pi y)) / 2 on [-1, 1].
Kernel cosine_kernel();
Kernel kernel_by_name(const std::string& name);

// Checks every Kernel invariant numerically; the factories above run it.
// A kernel whose derivative jumps at the support edge (e.g. Epanechnikov)
// fails the K'(+-1) = 0 check and is rejected here.
void validate_kernel(const Kernel& kernel);

struct BandwidthSchedule {
  enum class HRule { fixed, paper_power };       // paper_power: h = T^{(H-1)/3}
  enum class EpsRule { fixed, squared_bandwidth };  // squared: eps = h^2

  HRule h_rule = HRule::paper_power;
  double h_fixed = 0.0;
  EpsRule eps_rule = EpsRule::squared_bandwidth;
  double eps_fixed = 0.0;

  static BandwidthSchedule paper();
  static BandwidthSchedule fixed(double h, double eps);
};

struct ScheduleValues {
  double h;
  double epsilon;
};

ScheduleValues schedule_eval(const BandwidthSchedule& schedule, double horizon,
                             const HurstIndex& hurst);

// Below this occupation level the kernel window holds too little local time
// for a meaningful ratio; estimates are flagged, never silently zeroed.
double degeneracy_threshold(double h);

// f_hat(x) = (1/(T h)) sum_i K((X(t_i) - x)/h) dt, left-point rule.
double density_estimate(const Path& x_path, double x, double h,
                        const Kernel& kernel);

struct PathwiseEstimate {
  double riemann = 0.0;      // Young-sum numerator route
  double closed_form = 0.0;  // primitive-difference route
  double f_hat = 0.0;
  bool degenerate = false;
};

// The pathwise Nadaraya-Watson ratio; consistent for nothing but zero, which
// is exactly what the collapse experiments check. Both computation routes
// are exposed for cross-validation of the change-of-variable identity.
PathwiseEstimate pathwise_estimate(const Path& x_path, double x, double h,
                                   const Kernel& kernel);

struct DriftEstimate {
  double estimate = 0.0;
  double correction = 0.0;  // subtracted alpha_H sigma^2 double integral
  double f_hat = 0.0;
  double pathwise_numerator = 0.0;  // int K((X-x)/h) dX
  bool degenerate = false;
};

// The computable estimator: pathwise numerator minus the coupled-ratio
// correction, over the kernel occupation time. decay_rate > 0 (the model's
// dissipativity constant, when the caller knows it) enables the windowed
// inner sum; 0 keeps the full O(n^2) quadrature.
DriftEstimate drift_estimate_eps(const fsde::CoupledPaths& paths, double sigma,
                                 const HurstIndex& hurst, double x, double h,
                                 const Kernel& kernel, double epsilon,
                                 double decay_rate = 0.0);

struct DriftEstimateDiag {
  double estimate = 0.0;
  double correction = 0.0;
  double f_hat = 0.0;
  double bias_term = 0.0;       // B_{T,h}(x)
  double skorokhod_term = 0.0;  // S_{T,h}(x)
  bool degenerate = false;
};

// Oracle variant using exp(int b') along the path for the ratio; needs the
// drift model and serves as the epsilon-free reference. The bias and
// Skorokhod components of the decomposition
//   b_hat(x) - b(x) = B_{T,h}(x)/f_hat + S_{T,h}(x)/f_hat
// are exposed as diagnostics.
DriftEstimateDiag drift_estimate_skorokhod(const Path& x_path,
                                           const fsde::DriftModel& drift,
                                           double sigma,
                                           const HurstIndex& hurst, double x,
                                           double h, const Kernel& kernel);

struct EstimatorOutput {
  std::vector<double> x_grid;
  std::vector<double> f_hat;
  std::vector<double> b_tilde;
  std::vector<double> b_hat_eps;
  std::vector<double> correction;
  std::vector<bool> degenerate_mask;
  double h_used = 0.0;
  double eps_used = 0.0;
  double horizon_used = 0.0;
};

// All estimators across an x-grid; flagged entries carry NaN values.
EstimatorOutput estimate_profile(const fsde::CoupledPaths& paths, double sigma,
                                 const HurstIndex& hurst,
                                 const std::vector<double>& x_grid, double h,
                                 double epsilon, const Kernel& kernel,
                                 double decay_rate = 0.0);

// Nine points at the empirical 0.1..0.9 quantiles of a calibration path;
// avoids probing only the degenerate center where odd drifts vanish.
std::vector<double> default_x_grid(const Path& calibration,
                                   std::size_t points = 9);

}  // namespace fracdrift::estimators
