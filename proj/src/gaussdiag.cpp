#include "fracdrift/gaussdiag.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracdrift::gaussdiag {

double normal_density(double y) {
  return std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI);
}

double hermite_poly(int q, double y) {
  if (q < 0 || q > 50) {
    throw std::invalid_argument("hermite_poly: q must lie in [0, 50]");
  }
  if (q == 0) return 1.0;
  double hm = 1.0;  // H_0
  double h = y;     // H_1
  for (int k = 1; k < q; ++k) {
    const double next = y * h - static_cast<double>(k) * hm;
    hm = h;
    h = next;
  }
  return h;
}

GaussLegendre gauss_legendre(std::size_t n) {
  if (n < 2) throw std::invalid_argument("gauss_legendre: n < 2");
  GaussLegendre out;
  out.nodes.resize(n);
  out.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 -
              static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    out.nodes[i] = -z;
    out.nodes[n - 1 - i] = z;
    out.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    out.weights[n - 1 - i] = out.weights[i];
  }
  return out;
}

GaussHermite gauss_hermite(std::size_t n) {
  if (n < 2) throw std::invalid_argument("gauss_hermite: n < 2");
  GaussHermite out;
  out.nodes.resize(n);
  out.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  double z = 0.0;
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // standard asymptotic starting guesses for roots of H_n
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * out.nodes[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * out.nodes[n - 2];
    } else {
      z = 2.0 * z - out.nodes[n - i + 1];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (static_cast<double>(j) + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) /
                       (static_cast<double>(j) + 1.0)) *
                 p3;
      }
      pp = std::sqrt(2.0 * static_cast<double>(n)) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14) break;
    }
    out.nodes[n - 1 - i] = z;
    out.nodes[i] = -z;
    out.weights[n - 1 - i] = 2.0 / (pp * pp);
    out.weights[i] = out.weights[n - 1 - i];
  }
  return out;
}

double gauss_expectation(const std::function<double(double)>& f,
                         std::size_t n) {
  static thread_local std::size_t cached_n = 0;
  static thread_local GaussHermite gh;
  if (cached_n != n) {
    gh = gauss_hermite(n);
    cached_n = n;
  }
  const double sqrt2 = std::sqrt(2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += gh.weights[i] * f(sqrt2 * gh.nodes[i]);
  }
  return acc / std::sqrt(M_PI);
}

HermiteCoeffs hermite_coeffs_of_kernel_functional(
    const estimators::Kernel& kernel, double h, double x, double sigma0,
    int q_max) {
  if (!(h > 0.0)) throw std::invalid_argument("hermite_coeffs: h <= 0");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("hermite_coeffs: sigma0 <= 0");
  if (q_max < 1 || q_max > 50) {
    throw std::invalid_argument("hermite_coeffs: q_max out of range");
  }

  // substitution y = (x + h w)/sigma0 maps the kernel part of
  //   J(q) = int G(y) H_q(y) nu(y) dy
  // onto [-1, 1]; the centering term contributes nothing for q >= 1 because
  // E[H_q(U)] = 0 exactly.
  const GaussLegendre gl = gauss_legendre(96);
  auto kernel_moment = [&](const std::function<double(double)>& weight) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double w = gl.nodes[i];
      const double y = (x + h * w) / sigma0;
      acc += gl.weights[i] * kernel.k(w) * weight(y) * normal_density(y);
    }
    return acc / sigma0;
  };

  HermiteCoeffs out;
  out.q_max = q_max;
  out.j.assign(static_cast<std::size_t>(q_max) + 1, 0.0);
  out.r_tx = kernel_moment([](double) { return 1.0; });
  for (int q = 1; q <= q_max; ++q) {
    out.j[static_cast<std::size_t>(q)] =
        kernel_moment([q](double y) { return hermite_poly(q, y); });
  }

  // E[G^2] = (1/(sigma0 h)) int K(w)^2 nu(y(w)) dw - R^2
  double ksq = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double w = gl.nodes[i];
    const double y = (x + h * w) / sigma0;
    ksq += gl.weights[i] * kernel.k(w) * kernel.k(w) * normal_density(y);
  }
  out.second_moment = ksq / (sigma0 * h) - out.r_tx * out.r_tx;

  const double g_norm = std::sqrt(std::max(out.second_moment, 0.0));
  double fact = 1.0;
  out.hermite_rank = 0;
  for (int q = 1; q <= q_max; ++q) {
    fact *= static_cast<double>(q);
    if (std::abs(out.j[static_cast<std::size_t>(q)]) >=
        1e-9 * std::sqrt(fact) * g_norm) {
      out.hermite_rank = q;
      break;
    }
  }
  return out;
}

MehlerCheck mehler_check(int q, double rho, std::size_t mc_samples,
                         SeedSpec seed) {
  if (std::abs(rho) > 1.0) {
    throw std::invalid_argument("mehler_check: |rho| > 1");
  }
  if (mc_samples < 2) {
    throw std::invalid_argument("mehler_check: need at least 2 samples");
  }
  Rng rng(seed);
  const double ortho = std::sqrt(1.0 - rho * rho);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    const double z1 = rng.gaussian();
    const double z2 = rho * z1 + ortho * rng.gaussian();
    const double prod = hermite_poly(q, z1) * hermite_poly(q, z2);
    sum += prod;
    sum_sq += prod * prod;
  }
  const double n = static_cast<double>(mc_samples);
  MehlerCheck out;
  out.empirical = sum / n;
  double fact = 1.0;
  for (int k = 2; k <= q; ++k) fact *= static_cast<double>(k);
  out.predicted = fact * std::pow(rho, q);
  const double var = std::max(0.0, sum_sq / n - out.empirical * out.empirical);
  out.stderr_ = std::sqrt(var / n);
  return out;
}

double autocorr_double_integral(const std::vector<double>& rho_hat,
                                double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("autocorr_double_integral: bad horizon or dt");
  }
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  if (n < 1) throw std::invalid_argument("autocorr_double_integral: empty grid");
  if (rho_hat.size() < n) {
    throw std::invalid_argument(
        "autocorr_double_integral: lag array shorter than the grid");
  }
  if (rho_hat[0] != 1.0) {
    throw std::invalid_argument("autocorr_double_integral: rho_hat[0] must be 1");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += static_cast<double>(n - k) * std::abs(rho_hat[k]);
  }
  return dt * dt * (2.0 * acc - static_cast<double>(n));
}

}  // namespace fracdrift::gaussdiag
