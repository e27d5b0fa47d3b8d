#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqz/analytic.hpp"
#include "sqz/tof.hpp"

using namespace sqz;
using namespace sqz::tof;

namespace {
const PhysParams unit;
constexpr std::size_t kSamples = 100000;
const double ks_floor = 1.63 / std::sqrt(double(kSamples));
}  // namespace

TEST(SamplePositions, GroundStateVarianceAtUnitTime) {
  const auto x = sample_positions(0, 1.0, kSamples, 1234, unit);
  ASSERT_EQ(x.size(), kSamples);
  EXPECT_LT(std::abs(sample_stats(x).variance - 1.0), 3.0 * std::sqrt(2.0 / kSamples));
}

TEST(SamplePositions, FirstExcitedMeanIsZero) {
  const auto x = sample_positions(1, 2.0, kSamples, 99, unit);
  const double sd = std::sqrt(position_variance(1, 2.0, unit));
  EXPECT_LT(std::abs(sample_stats(x).mean), 3.0 * sd / std::sqrt(double(kSamples)));
}

TEST(SamplePositions, KolmogorovSmirnovAgainstIndependentCdfs) {
  const auto x0 = sample_positions(0, 1.0, kSamples, 5, unit);
  EXPECT_LT(ks_distance(x0, [](double v) { return oracle::normal_cdf(v, 0.0, 1.0); }), ks_floor);
  const auto x1 = sample_positions(1, 1.0, kSamples, 6, unit);
  // |psi_1(x, t)|^2 is proportional to x^2 exp(-x^2/(2 s2)) with s2 = sigma0^2 (1 + w^2 t^2).
  EXPECT_LT(ks_distance(x1, [](double v) { return oracle::first_excited_cdf(v, 1.0); }), ks_floor);
}

TEST(SamplePositions, SecondExcitedUsesGridDensity) {
  const auto cdf = position_cdf(2, 1.0, unit);
  EXPECT_GE(cdf.x.size(), kCdfNodes);
  // Against a Simpson-integrated CDF of the closed-form |psi_2| built from the
  // time-scaled eigen-density (shape preserved under free flight).
  const double s = std::sqrt(2.0);
  for (double v : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double ref = quad::simpson(
        [s](double u) {
          const double e = analytic::sho_eigenfunction(2, u / s, unit);
          return e * e / s;
        },
        -30.0, v, 1 << 14);
    EXPECT_NEAR(cdf(v), ref, 1e-6) << v;
  }
  const auto x = sample_positions(2, 1.0, kSamples, 7, unit);
  EXPECT_LT(std::abs(sample_stats(x).variance / position_variance(2, 1.0, unit) - 1.0), 0.03);
}

TEST(SamplePositions, RejectsBadInput) {
  EXPECT_THROW(sample_positions(0, 0.0, 10, 1, unit), DomainError);
  EXPECT_THROW(sample_positions(0, -1.0, 10, 1, unit), DomainError);
  EXPECT_THROW(sample_positions(3, 1.0, 10, 1, unit), DomainError);
}

TEST(InferMomenta, Examples) {
  const std::vector<double> x{0.0, 2.0};
  const auto p = infer_momenta(x, 1.0, unit);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 2.0);
  EXPECT_DOUBLE_EQ(infer_momenta(x, 4.0, PhysParams(3.0, 1.0, 1.0))[1], 1.5);
  EXPECT_THROW(infer_momenta(x, 0.0, unit), DomainError);
}

TEST(InferMomenta, InferredVarianceAtLongFlight) {
  EXPECT_DOUBLE_EQ(predicted_inferred_variance(0, 10.0, unit), 0.505);
  const auto run = run_tof(0, 10.0, kSamples, 31, unit);
  EXPECT_EQ(run.inferred_momenta.size(), kSamples);
  const double v = sample_stats(run.inferred_momenta).variance;
  EXPECT_LT(std::abs(v - 0.505), 3.0 * 0.505 * std::sqrt(2.0 / (kSamples - 1)));
}

TEST(SystematicError, ExamplesAndMonotonicity) {
  EXPECT_DOUBLE_EQ(tof_systematic_error(1.0, unit), 1.0);
  EXPECT_NEAR(tof_systematic_error(10.0, unit), 0.01, 1e-17);
  double prev = tof_systematic_error(0.1, unit);
  for (double t = 0.2; t < 1e4; t *= 1.7) {
    const double e = tof_systematic_error(t, unit);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-7);
  EXPECT_THROW(tof_systematic_error(0.0, unit), DomainError);
  // The excess equals sigma^2(t) m^2 / t^2 over hbar m omega / 2, minus one.
  const double t = 3.0;
  EXPECT_NEAR(analytic::sigma_x_sq(t, unit) / (t * t) / analytic::sigma_p_sq(unit) - 1.0,
              tof_systematic_error(t, unit), 1e-15);
}

TEST(Determinism, SameSeedSameSamplesAnyShardCount) {
  const auto a = run_tof(1, 3.0, 20000, 77, unit, 1);
  const auto b = run_tof(1, 3.0, 20000, 77, unit, 1);
  const auto c = run_tof(1, 3.0, 20000, 77, unit, 3);
  EXPECT_EQ(a.inferred_momenta, b.inferred_momenta);
  EXPECT_EQ(a.inferred_momenta, c.inferred_momenta);
  EXPECT_NE(a.inferred_momenta, run_tof(1, 3.0, 20000, 78, unit).inferred_momenta);
  EXPECT_EQ(a.rng, std::string(kRngId));
}

TEST(Convergence, KsToTrappedDistributionFallsToFloor) {
  for (int n : {0, 1, 2}) {
    const auto target = momentum_cdf(n, unit);
    std::vector<double> ks;
    for (double wt : {1.0, 3.0, 10.0, 30.0}) ks.push_back(ks_distance(run_tof(n, wt, kSamples, 2024, unit).inferred_momenta, target));
    for (std::size_t i = 1; i < ks.size(); ++i) {
      if (ks[i - 1] > ks_floor) {
        EXPECT_LT(ks[i], ks[i - 1]) << "n=" << n << " step " << i;
      } else {
        EXPECT_LT(ks[i], ks_floor) << "n=" << n << " step " << i;
      }
    }
    EXPECT_LT(ks.back(), ks_floor) << "n=" << n;
  }
}

TEST(FirstExcited, HistogramNodeAtZeroMomentum) {
  const auto run = run_tof(1, 30.0, kSamples, 8, unit);
  const auto h = histogram(run.inferred_momenta, -4.05, 4.05, 81);  // centre bin straddles p = 0
  const std::size_t mid = 40;
  ASSERT_NEAR(h.center(mid), 0.0, 1e-12);
  // Expected count at the node: samples * integral of |phi_1|^2 over the bin.
  const double expected = kSamples * quad::simpson([](double p) { return analytic::prob_p_n(1, p, unit); },
                                                    -0.05, 0.05, 64);
  EXPECT_LT(std::abs(double(h.counts[mid]) - expected), 4.0 * std::sqrt(expected) + 3.0);
  EXPECT_LT(double(h.counts[mid]), 0.01 * double(*std::max_element(h.counts.begin(), h.counts.end())));
}

TEST(Histogram, Basics) {
  const std::vector<double> v{-1.0, -0.5, 0.0, 0.5, 0.99, 1.0};
  const auto h = histogram(v, -1.0, 1.0, 4);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 1, 2}));
  EXPECT_THROW(histogram(v, 1.0, -1.0, 4), DomainError);
}
