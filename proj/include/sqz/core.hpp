#pragma once

// Physical parameters of the "hidden" oscillator that sets the initial
// Gaussian width, plus the phase-space displacement of the wavepacket.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

namespace detail {

inline void require_positive_finite(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw DomainError(std::string(name) + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

}  // namespace detail

/// Mass, oscillator frequency and action constant. Defaults to natural units
/// (m = omega = hbar = 1). Immutable once constructed.
class PhysParams {
public:
  PhysParams() = default;
  PhysParams(double mass, double omega, double hbar)
      : mass_(mass), omega_(omega), hbar_(hbar) {
    detail::require_positive_finite(mass, "mass");
    detail::require_positive_finite(omega, "omega");
    detail::require_positive_finite(hbar, "hbar");
    if (!(sigma0_sq() > 0.0) || !std::isfinite(sigma0_sq())) {
      throw DomainError("ground-state variance hbar/(2 m omega) is not a positive finite number");
    }
  }

  [[nodiscard]] double mass() const noexcept { return mass_; }
  [[nodiscard]] double omega() const noexcept { return omega_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }

  /// Ground-state position variance hbar / (2 m omega).
  [[nodiscard]] double sigma0_sq() const noexcept { return hbar_ / (2.0 * mass_ * omega_); }

  /// Oscillator length sqrt(hbar / (m omega)).
  [[nodiscard]] double length_scale() const noexcept { return std::sqrt(hbar_ / (mass_ * omega_)); }

  /// Oscillator momentum sqrt(hbar m omega).
  [[nodiscard]] double momentum_scale() const noexcept { return std::sqrt(hbar_ * mass_ * omega_); }

  friend bool operator==(const PhysParams&, const PhysParams&) = default;

private:
  double mass_ = 1.0;
  double omega_ = 1.0;
  double hbar_ = 1.0;
};

/// Phase-space offset (x0, p0) of the initial wavepacket.
struct Displacement {
  double x0 = 0.0;
  double p0 = 0.0;

  void validate() const {
    detail::require_finite(x0, "x0");
    detail::require_finite(p0, "p0");
  }

  /// Coherent-state label alpha = x0 sqrt(m omega / 2 hbar) + i p0 / sqrt(2 hbar m omega).
  [[nodiscard]] cplx alpha(const PhysParams& params) const {
    validate();
    const double m = params.mass(), w = params.omega(), h = params.hbar();
    return {x0 * std::sqrt(m * w / (2.0 * h)), p0 / std::sqrt(2.0 * h * m * w)};
  }

  friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Oscillator frequency whose ground state has position spread `sigma`:
/// omega = hbar / (2 m sigma^2).
inline double omega_from_sigma(double sigma, double mass, double hbar) {
  detail::require_positive_finite(sigma, "sigma");
  detail::require_positive_finite(mass, "mass");
  detail::require_positive_finite(hbar, "hbar");
  const double omega = hbar / (2.0 * mass * sigma * sigma);
  detail::require_positive_finite(omega, "omega (derived)");
  return omega;
}

/// Inverse of omega_from_sigma.
inline double sigma_from_omega(double omega, double mass, double hbar) {
  detail::require_positive_finite(omega, "omega");
  detail::require_positive_finite(mass, "mass");
  detail::require_positive_finite(hbar, "hbar");
  return std::sqrt(hbar / (2.0 * mass * omega));
}

/// Initial position variance sigma_0^2 = hbar / (2 m omega).
inline double sigma_sq_initial(const PhysParams& params) noexcept { return params.sigma0_sq(); }

}  // namespace sqz
