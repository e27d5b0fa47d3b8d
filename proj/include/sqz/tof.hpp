#pragma once

// Time-of-flight momentum inference: release an oscillator Fock state,
// let it expand freely for time t, detect positions and infer p = m x / t.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sqz/analytic.hpp"
#include "sqz/core.hpp"
#include "sqz/gridprop.hpp"
#include "sqz/quadrature.hpp"

namespace sqz::tof {

inline constexpr std::size_t kCdfNodes = std::size_t{1} << 14;
inline constexpr std::size_t kBlockSize = 4096;
inline constexpr double kTableHalfWidth = 12.0;  // in standard deviations
inline constexpr const char* kRngId =
    "std::mt19937_64/seed_seq{seed_lo,seed_hi,block_lo,block_hi}/block=4096/u=(x>>11)*2^-53/v1";

/// Cumulative distribution tabulated on uniformly spaced nodes.
struct TabulatedCdf {
  std::vector<double> x;
  std::vector<double> cdf;

  /// Linear interpolation of the tabulated CDF; 0 and 1 outside the table.
  [[nodiscard]] double operator()(double v) const {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return 1.0;
    const double h = x[1] - x[0];
    const auto i = std::min(static_cast<std::size_t>((v - x.front()) / h), x.size() - 2);
    const double f = (v - x[i]) / h;
    return cdf[i] + f * (cdf[i + 1] - cdf[i]);
  }

  /// Inverse of operator() for u in [0, 1).
  [[nodiscard]] double inverse(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return x.back();
    const auto j = static_cast<std::size_t>(it - cdf.begin());
    if (j == 0) return x.front();
    const std::size_t i = j - 1;
    const double span = cdf[j] - cdf[i];
    return span > 0.0 ? x[i] + (u - cdf[i]) / span * (x[j] - x[i]) : x[i];
  }
};

inline TabulatedCdf tabulate(std::vector<double> nodes, std::span<const double> density) {
  const double h = nodes[1] - nodes[0];
  auto cdf = quad::cumulative_trapezoid(density, h);
  const double total = cdf.back();
  for (auto& c : cdf) c /= total;
  cdf.back() = 1.0;
  return {std::move(nodes), std::move(cdf)};
}

/// Position variance of Fock state n after flight time t:
/// (n + 1/2)(hbar / m omega)(1 + omega^2 t^2).
inline double position_variance(int n, double t, const PhysParams& params) {
  const double w = params.omega();
  return (n + 0.5) * params.length_scale() * params.length_scale() * (1.0 + w * w * t * t);
}

/// Momentum variance (n + 1/2) hbar m omega of Fock state n.
inline double momentum_variance(int n, const PhysParams& params) {
  return (n + 0.5) * params.momentum_scale() * params.momentum_scale();
}

/// Expected variance of m x / t: momentum_variance * (1 + 1/(omega t)^2).
inline double predicted_inferred_variance(int n, double t, const PhysParams& params) {
  const double wt = params.omega() * t;
  return momentum_variance(n, params) * (1.0 + 1.0 / (wt * wt));
}

/// Relative excess of the inferred-momentum variance over its trapped value,
/// 1 / (omega t)^2. The initial position spread maps onto a momentum error
/// that shrinks as the flight lengthens.
inline double tof_systematic_error(double t, const PhysParams& params) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("flight time must be positive");
  const double wt = params.omega() * t;
  return 1.0 / (wt * wt);
}

namespace detail {

inline void check_inputs(int n, double t) {
  if (n < 0 || n > 2) throw DomainError("time of flight supports Fock states n in {0, 1, 2}");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("flight time must be positive and finite");
}

// Second excited state density from the grid oracle.
inline TabulatedCdf second_excited_cdf(double t, double half_width, const PhysParams& params) {
  std::size_t points = kCdfNodes;
  const double p_needed = kTableHalfWidth * std::sqrt(momentum_variance(2, params));
  while (pi * params.hbar() * static_cast<double>(points) / (2.0 * half_width) < p_needed) {
    points *= 2;
    if (points > (std::size_t{1} << 20)) throw DomainError("flight time too long for the n = 2 grid");
  }
  const auto grid = grid::GridSpec::centered(0.0, half_width, points);
  const auto psi0 = grid::init_from_function(
      grid, [&](double x) { return cplx(analytic::sho_eigenfunction(2, x, params)); });
  const auto psi_t = grid::free_propagate(psi0, t, params);
  std::vector<double> nodes(points);
  for (std::size_t i = 0; i < points; ++i) nodes[i] = grid.x(i);
  return tabulate(std::move(nodes), psi_t.density());
}

}  // namespace detail

/// Position CDF at flight time t for Fock state n. n <= 1 uses the closed
/// forms on 2^14 nodes; n = 2 uses the grid-propagated density (>= 2^14
/// nodes). The table spans +-12 standard deviations.
inline TabulatedCdf position_cdf(int n, double t, const PhysParams& params) {
  detail::check_inputs(n, t);
  const double half = kTableHalfWidth * std::sqrt(position_variance(n, t, params));
  if (n == 2) return detail::second_excited_cdf(t, half, params);
  std::vector<double> nodes(kCdfNodes), dens(kCdfNodes);
  const double h = 2.0 * half / static_cast<double>(kCdfNodes - 1);
  for (std::size_t i = 0; i < kCdfNodes; ++i) {
    nodes[i] = -half + static_cast<double>(i) * h;
    dens[i] = n == 0 ? analytic::prob_x(nodes[i], t, params, 0.0) : analytic::prob_x_n1(nodes[i], t, params);
  }
  return tabulate(std::move(nodes), dens);
}

/// CDF of the trapped momentum density |phi_n(p)|^2.
inline TabulatedCdf momentum_cdf(int n, const PhysParams& params) {
  if (n < 0 || n > analytic::kMaxEigenfunctionOrder) throw DomainError("momentum_cdf: bad Fock index");
  const double half = kTableHalfWidth * std::sqrt(momentum_variance(n, params));
  std::vector<double> nodes(kCdfNodes), dens(kCdfNodes);
  const double h = 2.0 * half / static_cast<double>(kCdfNodes - 1);
  for (std::size_t i = 0; i < kCdfNodes; ++i) {
    nodes[i] = -half + static_cast<double>(i) * h;
    dens[i] = analytic::prob_p_n(n, nodes[i], params);
  }
  return tabulate(std::move(nodes), dens);
}

/// Uniform deviates for block b of a run. Each block owns an independent
/// generator, so results do not depend on how blocks are spread over threads.
inline void fill_uniform_block(std::uint64_t seed, std::uint64_t block, std::span<double> out) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  std::mt19937_64 gen(seq);
  for (auto& u : out) u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draws from `table`, computed in 4096-sample blocks spread
/// over `shards` threads.
inline std::vector<double> sample_from(const TabulatedCdf& table, std::size_t count, std::uint64_t seed,
                                       unsigned shards = 1) {
  std::vector<double> out(count);
  const std::size_t blocks = (count + kBlockSize - 1) / kBlockSize;
  shards = std::max(1u, shards);
  auto work = [&](unsigned shard) {
    std::vector<double> u(kBlockSize);
    for (std::size_t b = shard; b < blocks; b += shards) {
      const std::size_t begin = b * kBlockSize;
      const std::size_t len = std::min(kBlockSize, count - begin);
      fill_uniform_block(seed, b, std::span(u).first(len));
      for (std::size_t i = 0; i < len; ++i) out[begin + i] = table.inverse(u[i]);
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned s = 0; s < shards; ++s) pool.emplace_back(work, s);
  }
  return out;
}

/// Detector positions after flight time t for Fock state n in {0, 1, 2}.
inline std::vector<double> sample_positions(int n, double t, std::size_t count, std::uint64_t seed,
                                            const PhysParams& params, unsigned shards = 1) {
  return sample_from(position_cdf(n, t, params), count, seed, shards);
}

/// p = m x / t for a particle released at the origin.
inline std::vector<double> infer_momenta(std::span<const double> positions, double t, const PhysParams& params) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("flight time must be positive");
  std::vector<double> p(positions.size());
  const double s = params.mass() / t;
  std::transform(positions.begin(), positions.end(), p.begin(), [s](double x) { return s * x; });
  return p;
}

/// Kolmogorov-Smirnov statistic sup |F_empirical - F|.
template <typename Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

inline SampleStats sample_stats(std::span<const double> v) {
  SampleStats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.variance += (x - s.mean) * (x - s.mean);
  if (v.size() > 1) s.variance /= static_cast<double>(v.size() - 1);
  return s;
}

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  [[nodiscard]] double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  [[nodiscard]] double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
};

/// Equal-width histogram on [lo, hi); values outside are dropped.
inline Histogram histogram(std::span<const double> v, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw DomainError("histogram: need bins > 0 and hi > lo");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double w = h.width();
  for (double x : v) {
    if (x < lo || x >= hi) continue;
    const auto i = std::min(static_cast<std::size_t>((x - lo) / w), bins - 1);
    ++h.counts[i];
  }
  return h;
}

struct TofRun {
  int n = 0;
  double flight_time = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngId;
  std::vector<double> inferred_momenta;
};

inline TofRun run_tof(int n, double t, std::size_t count, std::uint64_t seed, const PhysParams& params,
                      unsigned shards = 1) {
  TofRun run{n, t, count, seed, kRngId, {}};
  run.inferred_momenta = infer_momenta(sample_positions(n, t, count, seed, params, shards), t, params);
  return run;
}

}  // namespace sqz::tof
