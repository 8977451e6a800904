#pragma once

#include <functional>

#include "fracdrift/estimators.hpp"
#include "fracdrift/types.hpp"

namespace fracdrift::gaussdiag {

double normal_density(double y);

// Probabilists' Hermite polynomial H_q through the stable recurrence
// H_{q+1}(y) = y H_q(y) - q H_{q-1}(y); q is capped at 50.
double hermite_poly(int q, double y);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n);

struct GaussHermite {
  std::vector<double> nodes;    // weight e^{-t^2} on R
  std::vector<double> weights;
};
GaussHermite gauss_hermite(std::size_t n);

// E[f(U)], U ~ N(0,1), by Gauss-Hermite quadrature.
double gauss_expectation(const std::function<double(double)>& f,
                         std::size_t n = 64);

// Hermite coefficients of the centered kernel functional
//   G(y) = (1/h) K((sigma0 y - x)/h) - R,
// with R the Gaussian smoothing of the rescaled kernel at x. j[0] = 0 by
// centering; the rank is the first q >= 1 with a coefficient above the
// quadrature floor |J(q)| < 1e-9 sqrt(q!) ||G||_2.
struct HermiteCoeffs {
  int q_max = 0;
  std::vector<double> j;
  int hermite_rank = 0;
  double r_tx = 0.0;           // R: -> nu(x/sigma0)/sigma0 as h -> 0
  double second_moment = 0.0;  // E[G(U)^2]
};

HermiteCoeffs hermite_coeffs_of_kernel_functional(
    const estimators::Kernel& kernel, double h, double x, double sigma0,
    int q_max = 12);

struct MehlerCheck {
  double empirical = 0.0;
  double predicted = 0.0;  // q! rho^q
  double stderr_ = 0.0;
};

// Monte Carlo check of E[H_q(Z1) H_q(Z2)] = q! rho^q for standard normal
// pairs with correlation rho.
MehlerCheck mehler_check(int q, double rho, std::size_t mc_samples,
                         SeedSpec seed);

// dt^2 * sum_{i,j < n} |rho(|i-j|)|, the discrete double integral of the
// absolute autocorrelation over [0, T]^2, via the O(n) lag reduction.
double autocorr_double_integral(const std::vector<double>& rho_hat,
                                double horizon, double dt);

}  // namespace fracdrift::gaussdiag
