#pragma once

#include "fracdrift/fsde.hpp"
#include "fracdrift/types.hpp"

namespace fracdrift::integrals {

// Left-point Riemann sum sum_k x(t_k) (w(t_{k+1}) - w(t_k)) over the full
// grid; for Hoelder-compatible paths this converges to the Young integral
// as the mesh goes to zero.
double young_integral(const Path& integrand, const Path& integrator);

// Exact antiderivative of the singular factor over one cell left of u:
//   int_{lo}^{hi} (u - v)^{2H-2} dv
//     = ((u - lo)^{2H-1} - (u - hi)^{2H-1}) / (2H - 1),  hi <= u.
// Absorbing the integrable singularity at v = u analytically is what keeps
// the double-integral quadrature first-order instead of stalling near the
// diagonal.
double inner_kernel_integral(double u, double cell_lo, double cell_hi,
                             const HurstIndex& hurst);

enum class RatioMode { exact_linear, coupled, derivative };

RatioMode ratio_mode_by_name(const std::string& name);

// All three ratio routes reduce to a prefix array L with
//   R(t_i, t_j) = exp(L[i] - L[j]),  j < i.
// The shared convention is the discrete Euler flow: one step multiplies the
// difference by (1 + dt * q), so L increments by log1p(dt * q). Using raw
// b' * dt prefix sums instead would make the routes disagree at O(dt) and
// the cross-mode consistency checks would be meaningless.
struct RatioPrefix {
  std::vector<double> log_prefix;
};

RatioPrefix ratio_prefix(const fsde::CoupledPaths& cp);
RatioPrefix ratio_prefix(const fsde::DriftModel& drift, const Path& x);
RatioPrefix ratio_prefix_exact_linear(double lambda, const TimeGrid& grid);

struct CorrectionSpec {
  HurstIndex hurst;
  double sigma;
  RatioMode mode;
  // Dissipativity constant of the drift; when positive, inner-sum terms
  // beyond the lag where exp(-M dt k) < 1e-20 are dropped (the ratio decays
  // at least that fast in every mode, so the truncation is below rounding).
  double decay_rate = 0.0;
  // Explicit lag cap; 0 means derive from decay_rate (full sum when both 0).
  std::size_t max_lag = 0;

  double alpha_h() const {
    return hurst.value() * (2.0 * hurst.value() - 1.0);
  }
};

// Raw double integral
//   int_0^T int_0^u phi'(X(u)) R(u, v) |u - v|^{2H-2} dv du
// with the outer integral by the left-point rule, the inner cell-exact with
// R at each cell's left endpoint. Streams over u with O(n) memory.
double correction_double_integral(const Path& phi_prime_on_path,
                                  const RatioPrefix& ratio,
                                  const CorrectionSpec& spec);

// alpha_H sigma^2 * (double integral): the term subtracted from the pathwise
// integral of phi(X) against X to obtain the Skorokhod integral.
double skorokhod_correction(const Path& phi_prime_on_path,
                            const fsde::CoupledPaths& cp,
                            const CorrectionSpec& spec);
double skorokhod_correction(const Path& phi_prime_on_path,
                            const fsde::DriftModel& drift, const Path& x,
                            const CorrectionSpec& spec);
double skorokhod_correction(const Path& phi_prime_on_path,
                            const RatioPrefix& ratio,
                            const CorrectionSpec& spec);

// int phi(X) dX - alpha_H sigma^2 * (double integral): the Skorokhod
// integral of phi(X) against X.
double skorokhod_integral(const Path& phi_on_path,
                          const Path& phi_prime_on_path, const Path& x,
                          const RatioPrefix& ratio, const CorrectionSpec& spec);

// int phi(X) dB - alpha_H sigma * (double integral): the Skorokhod integral
// of phi(X) against the driving noise (one power of sigma less, since the
// Malliavin derivative of X carries the other).
double skorokhod_integral_vs_noise(const Path& phi_on_path,
                                   const Path& phi_prime_on_path,
                                   const Path& noise, const RatioPrefix& ratio,
                                   const CorrectionSpec& spec);

}  // namespace fracdrift::integrals
