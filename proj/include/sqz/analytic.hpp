#pragma once

// Closed-form free expansion of the displaced oscillator ground state and of
// oscillator Fock states, in position and momentum space.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sqz/core.hpp"

namespace sqz::analytic {

/// One evaluated point of a wavefunction.
struct WavefunctionSample {
  double coordinate = 0.0;
  cplx amplitude{};
  double density = 0.0;
};

inline constexpr int kMaxRawHermiteOrder = 64;
inline constexpr int kMaxEigenfunctionOrder = 1024;

// ---------------------------------------------------------------------------
// Gaussian (n = 0) with momentum kick p0, initially centred at the origin.

/// Position-space amplitude psi(x, t) of the freely expanding Gaussian.
/// (1 + i omega t)^(-1/2) is taken on the principal branch; for t >= 0 the
/// argument stays in the right half-plane.
inline cplx psi_xt(double x, double t, const PhysParams& params, double p0) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const cplx z{1.0, w * t};
  const double u = x - t * p0 / m;
  const double norm = std::pow(m * w / (pi * h), 0.25);
  const cplx exponent = -m * w * u * u / (2.0 * h * z) + I * (p0 * x / h) -
                        I * (t * p0 * p0 / (2.0 * h * m));
  return norm / std::sqrt(z) * std::exp(exponent);
}

/// |psi(x, t)|^2 evaluated from its real closed form.
inline double prob_x(double x, double t, const PhysParams& params, double p0) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const double spread = 1.0 + w * w * t * t;
  const double u = x - t * p0 / m;
  return std::sqrt(m * w / (pi * h * spread)) * std::exp(-m * w * u * u / (h * spread));
}

/// Position variance sigma^2(t) = sigma^2(0) (1 + omega^2 t^2).
inline double sigma_x_sq(double t, const PhysParams& params) {
  const double w = params.omega();
  return params.sigma0_sq() * (1.0 + w * w * t * t);
}

/// Momentum-space amplitude phi(p, t).
inline cplx phi_pt(double p, double t, const PhysParams& params, double p0) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const double dp = p - p0;
  const double magnitude = std::pow(pi * h * m * w, -0.25) * std::exp(-dp * dp / (2.0 * h * m * w));
  return magnitude * std::exp(-I * (p * p * t / (2.0 * m * h)));
}

/// |phi(p, t)|^2. Has no t argument: the momentum density of a free particle
/// is stationary, and evaluating it this way keeps that exact.
inline double prob_p(double p, const PhysParams& params, double p0) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const double dp = p - p0;
  return std::exp(-dp * dp / (h * m * w)) / std::sqrt(pi * h * m * w);
}

/// Momentum variance hbar m omega / 2, constant in time.
inline double sigma_p_sq(const PhysParams& params) {
  return params.hbar() * params.mass() * params.omega() / 2.0;
}

inline WavefunctionSample position_sample(double x, double t, const PhysParams& params, double p0) {
  return {x, psi_xt(x, t, params, p0), prob_x(x, t, params, p0)};
}

inline WavefunctionSample momentum_sample(double p, double t, const PhysParams& params, double p0) {
  return {p, phi_pt(p, t, params, p0), prob_p(p, params, p0)};
}

// ---------------------------------------------------------------------------
// Hermite polynomials and oscillator eigenfunctions.

/// Physicist's Hermite polynomial H_n(y) by three-term recurrence. Orders
/// above 64 are rejected; use the normalized Hermite functions instead.
inline double hermite_phys(int n, double y) {
  if (n < 0 || n > kMaxRawHermiteOrder) {
    throw DomainError("hermite_phys: order " + std::to_string(n) +
                      " outside [0, 64]; use sho_eigenfunction for high orders");
  }
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 2.0 * y;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * y * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Dimensionless normalized Hermite functions
///   h_n(s) = pi^(-1/4) (2^n n!)^(-1/2) H_n(s) exp(-s^2/2),  n = 0..nmax.
///
/// Uses h_{n+1} = sqrt(2/(n+1)) s h_n - sqrt(n/(n+1)) h_{n-1} with the
/// Gaussian factor carried as a separate log-scale, so neither H_n nor
/// exp(-s^2/2) is formed explicitly. Stable well past n = 1000.
inline std::vector<double> hermite_functions(int nmax, double s) {
  if (nmax < 0) throw DomainError("hermite_functions: negative order");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  double log_scale = -0.5 * s * s - 0.25 * std::log(pi);
  double prev = 0.0, cur = 1.0;
  out[0] = std::exp(log_scale);
  for (int n = 0; n < nmax; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * s * cur - std::sqrt(double(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e100) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
    out[static_cast<std::size_t>(n) + 1] = cur * std::exp(log_scale);
  }
  return out;
}

inline double hermite_function(int n, double s) {
  return hermite_functions(n, s).back();
}

/// Oscillator eigenfunction <x|n> in physical units (n <= 1024).
inline double sho_eigenfunction(int n, double x, const PhysParams& params) {
  if (n < 0 || n > kMaxEigenfunctionOrder) {
    throw DomainError("sho_eigenfunction: order " + std::to_string(n) + " outside [0, 1024]");
  }
  const double ell = params.length_scale();
  return hermite_function(n, x / ell) / std::sqrt(ell);
}

/// Momentum amplitude of Fock state n after free flight of duration t:
///   (pi hbar m omega)^(-1/4) (n! 2^n)^(-1/2) H_n(p/sqrt(hbar m omega))
///   exp(-p^2/(2 hbar m omega) - i p^2 t/(2 hbar m)).
/// The constant (-i)^n phase of the textbook <p|n> convention is not included.
inline cplx phi_n_pt(int n, double p, double t, const PhysParams& params) {
  if (n < 0 || n > kMaxEigenfunctionOrder) {
    throw DomainError("phi_n_pt: order " + std::to_string(n) + " outside [0, 1024]");
  }
  const double q = params.momentum_scale();
  const double magnitude = hermite_function(n, p / q) / std::sqrt(q);
  return magnitude * std::exp(-I * (p * p * t / (2.0 * params.hbar() * params.mass())));
}

/// |phi_n(p, t)|^2, exactly t-independent.
inline double prob_p_n(int n, double p, const PhysParams& params) {
  if (n < 0 || n > kMaxEigenfunctionOrder) {
    throw DomainError("prob_p_n: order " + std::to_string(n) + " outside [0, 1024]");
  }
  const double q = params.momentum_scale();
  const double h = hermite_function(n, p / q);
  return h * h / q;
}

// ---------------------------------------------------------------------------
// First excited state.

/// psi_1(x, t): free expansion of the first oscillator excited state.
inline cplx psi_1_xt(double x, double t, const PhysParams& params) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const cplx z{1.0, w * t};
  const double norm = std::pow(m * w / (pi * h), 0.25);
  return norm / std::sqrt(z) * std::sqrt(2.0 * m * w / h) * (x / z) *
         std::exp(-m * w * x * x / (2.0 * h * z));
}

/// |psi_1(x, t)|^2 from its real closed form: the n = 1 eigen-density with
/// x^2 -> x^2 / (1 + omega^2 t^2) and renormalized.
inline double prob_x_n1(double x, double t, const PhysParams& params) {
  const double m = params.mass(), w = params.omega(), h = params.hbar();
  const double spread = 1.0 + w * w * t * t;
  return std::sqrt(m * w / (pi * h)) / std::sqrt(spread) * (2.0 * m * w * x * x / (h * spread)) *
         std::exp(-m * w * x * x / (h * spread));
}

}  // namespace sqz::analytic
