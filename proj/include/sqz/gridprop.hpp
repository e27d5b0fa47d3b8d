#pragma once

// Spectral free-particle propagation on a uniform periodic grid. Free
// evolution is diagonal in momentum, so one forward transform, one phase
// multiply and one inverse transform propagate exactly; there is no time
// stepping error.
//
// Transform convention (fixed):
//   forward   psi_hat[k] = sum_j psi[j] exp(-2 pi i j k / M)      (FFTW_FORWARD)
//   momentum  p_k = 2 pi hbar k' / (M dx),  k' = k for k < M/2, else k - M
//   phi(p_k)  = dx / sqrt(2 pi hbar) * exp(-i p_k x_min / hbar) * psi_hat[k]
// which samples the unitary transform (2 pi hbar)^(-1/2) int psi(x) e^{-ipx/hbar} dx.

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sqz/analytic.hpp"
#include "sqz/core.hpp"

namespace sqz::grid {

inline constexpr std::size_t kDefaultPoints = 4096;
inline constexpr double kDefaultMargin = 40.0;
inline constexpr double kBoundaryTolerance = 1e-12;

struct GridSpec {
  double x_min = -1.0;
  double dx = 1.0;
  std::size_t points = kDefaultPoints;

  [[nodiscard]] double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx; }
  [[nodiscard]] double x_max() const noexcept { return x(points - 1); }
  [[nodiscard]] double length() const noexcept { return static_cast<double>(points) * dx; }
  /// Largest resolvable |p|.
  [[nodiscard]] double p_nyquist(const PhysParams& params) const noexcept { return pi * params.hbar() / dx; }

  void validate() const {
    if (points < 16 || !std::has_single_bit(points)) {
      throw DomainError("grid point count must be a power of two >= 16, got " + std::to_string(points));
    }
    if (!std::isfinite(x_min) || !std::isfinite(dx) || !(dx > 0.0)) {
      throw DomainError("grid spacing must be positive and finite");
    }
  }

  /// Grid of `points` nodes on [center - half_width, center + half_width).
  static GridSpec centered(double center, double half_width, std::size_t points = kDefaultPoints) {
    GridSpec g{center - half_width, 2.0 * half_width / static_cast<double>(points), points};
    g.validate();
    return g;
  }

  /// Grid wide enough to hold the displaced Gaussian with `margin` widths
  /// on either side at every time up to t_max.
  static GridSpec for_evolution(const PhysParams& params, const Displacement& d, double t_max,
                                std::size_t points = kDefaultPoints, double margin = kDefaultMargin) {
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be finite and >= 0");
    d.validate();
    const double width = std::sqrt(analytic::sigma_x_sq(t_max, params));
    const double end_center = d.x0 + t_max * d.p0 / params.mass();
    const double lo = std::min(d.x0, end_center) - margin * width;
    const double hi = std::max(d.x0, end_center) + margin * width;
    return centered(0.5 * (lo + hi), 0.5 * (hi - lo), points);
  }
};

struct GridWavefunction {
  GridSpec grid;
  std::vector<cplx> samples;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] double boundary_amplitude() const {
    return std::max(std::abs(samples.front()), std::abs(samples.back()));
  }
  [[nodiscard]] std::vector<double> density() const {
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [](cplx z) { return std::norm(z); });
    return out;
  }
};

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

/// Unnormalized DFT; sign is FFTW_FORWARD or FFTW_BACKWARD.
inline std::vector<cplx> dft(std::span<const cplx> in, int sign) {
  std::vector<cplx> src(in.begin(), in.end());
  std::vector<cplx> out(in.size());
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(in.size()), reinterpret_cast<fftw_complex*>(src.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("FFTW planning failed");
  fftw_execute(plan.get());
  return out;
}

inline double fft_momentum(std::size_t k, const GridSpec& g, const PhysParams& params) {
  const auto m = static_cast<long long>(g.points);
  auto kk = static_cast<long long>(k);
  if (kk >= m / 2) kk -= m;
  return 2.0 * pi * params.hbar() * static_cast<double>(kk) / g.length();
}

inline void normalize(GridWavefunction& gw) {
  double s = 0.0;
  for (auto z : gw.samples) s += std::norm(z);
  const double scale = 1.0 / std::sqrt(s * gw.grid.dx);
  for (auto& z : gw.samples) z *= scale;
}

}  // namespace detail

/// Samples f on the grid, optionally normalized to discrete unit norm.
inline GridWavefunction init_from_function(const GridSpec& grid, const std::function<cplx(double)>& f,
                                           bool normalize = true) {
  grid.validate();
  GridWavefunction gw{grid, std::vector<cplx>(grid.points)};
  for (std::size_t i = 0; i < grid.points; ++i) gw.samples[i] = f(grid.x(i));
  if (normalize) detail::normalize(gw);
  return gw;
}

/// exp(i p0 x / hbar) times the oscillator ground state centred at x0,
/// normalized on the grid. The grid must cover x0 +- 40 sigma_0 and resolve
/// momenta out to |p0| + 12 sigma_p.
inline GridWavefunction init_gaussian(const GridSpec& grid, const PhysParams& params, const Displacement& d) {
  grid.validate();
  d.validate();
  const double s0 = std::sqrt(params.sigma0_sq());
  // The grid is periodic on [x_min, x_min + length); allow rounding slack at the ends.
  const double slack = 1e-9 * kDefaultMargin * s0;
  if (grid.x_min > d.x0 - kDefaultMargin * s0 + slack ||
      grid.x_min + grid.length() < d.x0 + kDefaultMargin * s0 - slack) {
    throw DomainError("grid does not cover x0 +- 40 sigma_0");
  }
  if (grid.p_nyquist(params) < std::abs(d.p0) + 12.0 * std::sqrt(analytic::sigma_p_sq(params))) {
    throw DomainError("grid spacing too coarse for the initial momentum spread");
  }
  return init_from_function(grid, [&](double x) {
    return analytic::sho_eigenfunction(0, x - d.x0, params) * std::exp(I * (d.p0 * x / params.hbar()));
  });
}

/// Exact free evolution by time t. Throws WraparoundError when the result
/// has non-negligible amplitude at the grid ends.
inline GridWavefunction free_propagate(const GridWavefunction& gw, double t, const PhysParams& params) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("free_propagate: t must be finite and >= 0");
  if (t == 0.0) return gw;
  auto spec = detail::dft(gw.samples, FFTW_FORWARD);
  const double c = t / (2.0 * params.mass() * params.hbar());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double p = detail::fft_momentum(k, gw.grid, params);
    spec[k] *= std::polar(1.0, -c * p * p);
  }
  GridWavefunction out{gw.grid, detail::dft(spec, FFTW_BACKWARD)};
  const double inv = 1.0 / static_cast<double>(out.samples.size());
  for (auto& z : out.samples) z *= inv;
  if (out.boundary_amplitude() >= kBoundaryTolerance) {
    throw WraparoundError("propagated state reaches the grid boundary (|psi| = " +
                          std::to_string(out.boundary_amplitude()) + "); enlarge the grid");
  }
  return out;
}

/// Momentum-space samples phi(p) in ascending p.
struct MomentumRepresentation {
  std::vector<double> p;
  std::vector<cplx> phi;
};

inline MomentumRepresentation momentum_representation(const GridWavefunction& gw, const PhysParams& params) {
  const auto spec = detail::dft(gw.samples, FFTW_FORWARD);
  const std::size_t m = spec.size();
  const double h = params.hbar();
  const double pref = gw.grid.dx / std::sqrt(2.0 * pi * h);
  MomentumRepresentation rep;
  rep.p.resize(m);
  rep.phi.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = (i + m / 2) % m;  // ascending order
    const double p = detail::fft_momentum(k, gw.grid, params);
    rep.p[i] = p;
    rep.phi[i] = pref * std::exp(-I * (p * gw.grid.x_min / h)) * spec[k];
  }
  return rep;
}

struct PositionMoments {
  double norm = 0.0;
  double mean_x = 0.0;
  double var_x = 0.0;
};

struct MomentumMoments {
  double mean_p = 0.0;
  double var_p = 0.0;
};

inline PositionMoments moments(const GridWavefunction& gw) {
  double n = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < gw.size(); ++i) {
    const double w = std::norm(gw.samples[i]);
    n += w;
    m1 += w * gw.grid.x(i);
  }
  const double mean = m1 / n;
  double m2 = 0.0;
  for (std::size_t i = 0; i < gw.size(); ++i) {
    const double u = gw.grid.x(i) - mean;
    m2 += std::norm(gw.samples[i]) * u * u;
  }
  return {n * gw.grid.dx, mean, m2 / n};
}

inline MomentumMoments spectral_moments(const GridWavefunction& gw, const PhysParams& params) {
  const auto spec = detail::dft(gw.samples, FFTW_FORWARD);
  double n = 0.0, m1 = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double w = std::norm(spec[k]);
    n += w;
    m1 += w * detail::fft_momentum(k, gw.grid, params);
  }
  const double mean = m1 / n;
  double m2 = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double u = detail::fft_momentum(k, gw.grid, params) - mean;
    m2 += std::norm(spec[k]) * u * u;
  }
  return {mean, m2 / n};
}

}  // namespace sqz::grid
