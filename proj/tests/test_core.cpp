#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sqz/core.hpp"

using namespace sqz;

TEST(OmegaFromSigma, UnitSystem) { EXPECT_NEAR(omega_from_sigma(std::sqrt(0.5), 1.0, 1.0), 1.0, 1e-15); }

TEST(OmegaFromSigma, UnitWidth) { EXPECT_DOUBLE_EQ(omega_from_sigma(1.0, 1.0, 1.0), 0.5); }

TEST(OmegaFromSigma, SiFixture) {
  // hbar / (2 m sigma^2) with sigma = 0.4 um, m = 1.45e-25 kg.
  const double w = omega_from_sigma(0.4e-6, 1.45e-25, 1.0546e-34);
  EXPECT_NEAR(w / 2272.8448275862069 - 1.0, 0.0, 1e-15);
}

TEST(OmegaFromSigma, RejectsBadInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (double s : {0.0, -1.0, nan, inf}) EXPECT_THROW(omega_from_sigma(s, 1.0, 1.0), DomainError);
  EXPECT_THROW(omega_from_sigma(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(omega_from_sigma(1.0, 1.0, -2.0), DomainError);
}

TEST(SigmaSqInitial, Examples) {
  EXPECT_DOUBLE_EQ(sigma_sq_initial(PhysParams(1, 1, 1)), 0.5);
  EXPECT_DOUBLE_EQ(sigma_sq_initial(PhysParams(1, 0.5, 1)), 1.0);
  EXPECT_DOUBLE_EQ(sigma_sq_initial(PhysParams(2, 1, 1)), 0.25);
}

TEST(PhysParams, DefaultsAreNatural) {
  const PhysParams p;
  EXPECT_EQ(p, PhysParams(1, 1, 1));
  EXPECT_DOUBLE_EQ(p.length_scale(), 1.0);
  EXPECT_DOUBLE_EQ(p.momentum_scale(), 1.0);
}

TEST(PhysParams, RejectsInvalid) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(PhysParams(0, 1, 1), DomainError);
  EXPECT_THROW(PhysParams(1, -1, 1), DomainError);
  EXPECT_THROW(PhysParams(1, 1, nan), DomainError);
  EXPECT_THROW(PhysParams(1e300, 1e300, 1e-300), DomainError);  // sigma0^2 underflows
}

TEST(Displacement, AlphaMomentumOnly) {
  const PhysParams p(1, 1, 1);
  const cplx a = Displacement{0.0, 1.0}.alpha(p);
  EXPECT_DOUBLE_EQ(a.real(), 0.0);
  EXPECT_NEAR(a.imag(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Displacement, AlphaGeneral) {
  const PhysParams p(2.0, 3.0, 0.5);
  const cplx a = Displacement{0.7, -1.1}.alpha(p);
  EXPECT_NEAR(a.real(), 0.7 * std::sqrt(6.0 / 1.0), 1e-14);
  EXPECT_NEAR(a.imag(), -1.1 / std::sqrt(6.0), 1e-14);
  EXPECT_THROW((void)(Displacement{std::nan(""), 0.0}.alpha(p)), DomainError);
}

TEST(Property, OmegaSigmaRoundTripOverSixDecades) {
  oracle::Gen gen(20240601);
  for (int i = 0; i < 500; ++i) {
    const PhysParams p(gen.log_uniform(1e-3, 1e3), gen.log_uniform(1e-3, 1e3), gen.log_uniform(1e-3, 1e3));
    const double w = omega_from_sigma(std::sqrt(sigma_sq_initial(p)), p.mass(), p.hbar());
    EXPECT_NEAR(w / p.omega(), 1.0, 1e-12);
    EXPECT_NEAR(sigma_from_omega(p.omega(), p.mass(), p.hbar()) / std::sqrt(p.sigma0_sq()), 1.0, 1e-15);
  }
}
