#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqz/algebra.hpp"

using namespace sqz;
using namespace sqz::algebra;

namespace {
double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST(Commutators, ExactlyZero) {
  const auto report = verify_rep_commutators();
  EXPECT_TRUE(report.all_zero());
  EXPECT_EQ(report.checks[0].identity, "[K0,K+] - K+");
  EXPECT_EQ(report.checks[1].identity, "[K0,K-] + K-");
  EXPECT_EQ(report.checks[2].identity, "[K+,K-] + 2K0");
  for (const auto& c : report.checks) EXPECT_TRUE(c.exact_zero()) << c.identity;
}

TEST(Commutators, DetectsBrokenRepresentation) {
  Rep2x2 bad;
  bad.k_plus[1][0] = Rational(1);
  EXPECT_FALSE(verify_rep_commutators(bad).all_zero());
}

TEST(Nilpotency, ExactlyZeroBothBranches) {
  EXPECT_TRUE(is_zero(nilpotency_residual(Branch::Plus)));
  EXPECT_TRUE(is_zero(nilpotency_residual(Branch::Minus)));
  const auto mp = to_complex(Rep2x2{}.m(Branch::Plus));
  EXPECT_EQ(mp(0, 0), cplx(-1.0));
  EXPECT_EQ(mp(0, 1), cplx(1.0));
  EXPECT_EQ(mp(1, 0), cplx(-1.0));
  EXPECT_EQ(mp(1, 1), cplx(1.0));
}

TEST(ExpSqueeze2x2, Examples) {
  EXPECT_EQ(max_abs(exp_simplified_squeeze_2x2(0.0, Branch::Plus) - Matrix2c::Identity()), 0.0);
  Matrix2c expected;
  expected << cplx(1, 0.5), cplx(0, 0.5), cplx(0, -0.5), cplx(1, -0.5);
  EXPECT_LT(max_abs(exp_simplified_squeeze_2x2(0.25, Branch::Minus) - expected), 1e-16);
}

TEST(ExpSqueeze2x2, MatchesPowerSeries) {
  oracle::Gen gen(3);
  for (int i = 0; i < 100; ++i) {
    const cplx k{gen.uniform(-1, 1), gen.uniform(-1, 1)};
    for (auto br : {Branch::Plus, Branch::Minus}) {
      const Matrix2c a = 2.0 * I * k * to_complex(Rep2x2{}.m(br));
      EXPECT_LT(max_abs(exp_simplified_squeeze_2x2(k, br) - oracle::exp_series(a, 20)), 1e-14);
    }
  }
  EXPECT_THROW(exp_simplified_squeeze_2x2(cplx(std::nan(""), 0), Branch::Plus), DomainError);
}

TEST(DisentangleFactors, ZeroK) {
  const auto f = disentangle_factors(0.0, Branch::Minus);
  EXPECT_EQ(f.a, cplx(0.0));
  EXPECT_EQ(f.b, cplx(0.0));
  EXPECT_EQ(f.c, cplx(0.0));
  EXPECT_EQ(f.prefactor, cplx(1.0));
}

TEST(DisentangleFactors, FreeEvolutionAtUnitTime) {
  const auto f = disentangle_factors(0.25, Branch::Minus);
  EXPECT_LT(std::abs(f.a - cplx(0.2, 0.4)), 1e-15);
  EXPECT_EQ(f.a, f.c);
  EXPECT_NEAR(f.b.real(), -0.22314355131420976, 1e-15);
  EXPECT_NEAR(f.b.imag(), -0.92729521800161223, 1e-15);
}

TEST(DisentangleFactors, VacuumCoefficientAtTimeTwo) {
  EXPECT_LT(std::abs(vacuum_action(0.5, Branch::Minus).creation_coefficient - cplx(0.25, 0.25)), 1e-16);
  EXPECT_LT(std::abs(free_evolution_vacuum_coefficient(2.0) - cplx(0.25, 0.25)), 1e-16);
}

TEST(DisentangleFactors, PoleRaisesSingularityNamingK) {
  // 1 + 2ik = 0 at k = i/2 for Minus; 1 - 2ik = 0 at k = -i/2 for Plus.
  try {
    (void)disentangle_factors(cplx(0, 0.5), Branch::Minus);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("k = (0, 0.5)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(disentangle_factors(cplx(0, -0.5), Branch::Plus), SingularityError);
  EXPECT_THROW(vacuum_action(cplx(0, -0.5), Branch::Plus), SingularityError);
}

TEST(Property, ReassemblyOverRandomK) {
  oracle::Gen gen(20241016);
  int count = 0;
  while (count < 200) {
    const double r = 2.0 * std::sqrt(gen.uniform(0, 1));
    const double th = gen.uniform(0, 2 * pi);
    const cplx k = std::polar(r, th);
    bool skip = false;
    for (auto br : {Branch::Plus, Branch::Minus}) skip = skip || std::abs(pole_factor(k, br)) < 1e-2;
    if (skip) continue;
    ++count;
    for (auto br : {Branch::Plus, Branch::Minus}) {
      const auto f = disentangle_factors(k, br);
      EXPECT_LT(max_abs(reassemble_2x2(f) - exp_simplified_squeeze_2x2(k, br)), 1e-13) << k;
      EXPECT_EQ(f.a, f.c);
      EXPECT_LT(std::abs(std::exp(f.b / 2.0) - 1.0 / pole_factor(k, br)), 1e-13 * std::abs(std::exp(f.b / 2.0)));
      EXPECT_LT(std::abs(f.prefactor * f.prefactor * pole_factor(k, br) - 1.0), 1e-14);
    }
  }
}

TEST(VacuumAction, Examples) {
  const auto v0 = vacuum_action(0.0, Branch::Plus);
  EXPECT_EQ(v0.prefactor, cplx(1.0));
  EXPECT_EQ(v0.creation_coefficient, cplx(0.0));
  const auto v = vacuum_action(0.5, Branch::Minus);
  EXPECT_LT(std::abs(v.prefactor - 1.0 / std::sqrt(cplx(1, 1))), 1e-15);
  const cplx k2 = position_stage_k(1.0);
  EXPECT_LT(std::abs(vacuum_action(k2, Branch::Plus).creation_coefficient - cplx(0.1, 0.2)), 1e-15);
}

TEST(FreeEvolutionParams, Examples) {
  const auto s0 = free_evolution_squeeze_params(0.0, 1.0);
  EXPECT_EQ(s0.xi, cplx(0.0));
  EXPECT_EQ(s0.eta, 0.0);
  EXPECT_EQ(s0.k, cplx(0.0));
  const auto s2 = free_evolution_squeeze_params(2.0, 1.0);
  EXPECT_EQ(s2.xi, cplx(0, -1));
  EXPECT_EQ(s2.eta, -1.0);
  EXPECT_EQ(s2.k, cplx(0.5));
  EXPECT_EQ(s2.branch, Branch::Minus);
  EXPECT_LT(std::abs(position_stage_k(1.0) - cplx(0.125, -0.125)), 1e-16);
  EXPECT_THROW(free_evolution_squeeze_params(-1.0, 1.0), DomainError);
  EXPECT_THROW(free_evolution_squeeze_params(1.0, 0.0), DomainError);
}

TEST(FreeEvolutionParams, XiEqualsIEta) {
  for (double t : {0.1, 1.0, 3.0, 17.0}) {
    const auto s = free_evolution_squeeze_params(t, 2.5);
    EXPECT_EQ(s.xi, I * s.eta);
    EXPECT_DOUBLE_EQ(s.k.real(), 2.5 * t / 4.0);
    EXPECT_TRUE(on_principal_sheet(s.k, s.branch));
  }
}

TEST(Property, TwoStageCompositionAndPrefactorMerge) {
  for (int i = 0; i <= 400; ++i) {
    const double wt = 4.0 * i / 400.0;
    const cplx k2 = position_stage_k(wt);
    EXPECT_TRUE(on_principal_sheet(k2, Branch::Plus));
    const cplx via_k2 = vacuum_action(k2, Branch::Plus).creation_coefficient;
    EXPECT_LT(std::abs(via_k2 - free_evolution_vacuum_coefficient(wt)), 1e-14);
    EXPECT_LT(std::abs(vacuum_action(wt / 4.0, Branch::Minus).creation_coefficient -
                       free_evolution_vacuum_coefficient(wt)),
              1e-14);
    const cplx half{1.0, wt / 2.0};
    const cplx merged = std::pow(half, -0.5) * std::sqrt(half / cplx(1.0, wt));
    EXPECT_LT(std::abs(merged - std::pow(cplx(1.0, wt), -0.5)), 1e-14);
  }
}
