#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqz/core.hpp"
#include "sqz/linalg.hpp"

using namespace sqz;

namespace {

CMatrix random_matrix(oracle::Gen& gen, Eigen::Index n, double target_norm) {
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(gen.uniform(-1, 1), gen.uniform(-1, 1));
  return a * (target_norm / a.operatorNorm());
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(MatrixExp, ZeroIsIdentity) {
  const CMatrix z = CMatrix::Zero(7, 7);
  EXPECT_EQ(max_abs(matrix_exp(z) - CMatrix::Identity(7, 7)), 0.0);
}

TEST(MatrixExp, DiagonalPhases) {
  CVector th(5);
  th << 0.1, -2.0, 3.0, 17.0, -40.0;
  const CMatrix e = matrix_exp(CMatrix((I * th).asDiagonal()));
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_LT(std::abs(e(i, i) - std::exp(I * th(i))), 1e-13);
  EXPECT_LT(max_abs(e - CMatrix(e.diagonal().asDiagonal())), 1e-14);
}

TEST(MatrixExp, SelfInverse) {
  oracle::Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(gen, 12, gen.uniform(0.01, 5.0));
    EXPECT_LT(max_abs(matrix_exp(a) * matrix_exp(CMatrix(-a)) - CMatrix::Identity(12, 12)), 1e-11);
  }
}

TEST(MatrixExp, MatchesTaylorSeriesAtSmallNorm) {
  oracle::Gen gen(5);
  for (double nrm : {1e-3, 0.1, 0.5, 1.5}) {
    const CMatrix a = random_matrix(gen, 8, nrm);
    EXPECT_LT(max_abs(matrix_exp(a) - oracle::exp_series(a, 80)), 1e-14) << nrm;
  }
}

TEST(MatrixExp, AntiHermitianAtLargeNormMatchesSpectralRoute) {
  oracle::Gen gen(9);
  for (double nrm : {10.0, 50.0}) {
    CMatrix h = random_matrix(gen, 16, 1.0);
    h = (h + h.adjoint()).eval();
    h *= nrm / h.operatorNorm();
    const CMatrix u = unitary_from_hermitian(h, 1.0);
    EXPECT_LT(max_abs(matrix_exp(CMatrix(-I * h)) - u), 1e-12 * nrm);
    EXPECT_LT(max_abs(u.adjoint() * u - CMatrix::Identity(16, 16)), 1e-13);
  }
}

TEST(MatrixExp, NilpotentIsExact) {
  CMatrix m(2, 2);
  m << -1.0, 1.0, -1.0, 1.0;
  const cplx s{0.0, 0.7};
  EXPECT_LT(max_abs(matrix_exp(CMatrix(s * m)) - (CMatrix::Identity(2, 2) + s * m)), 1e-15);
}

TEST(MatrixExp, RejectsNonFiniteAndNonSquare) {
  CMatrix a = CMatrix::Zero(3, 3);
  a(1, 2) = cplx(std::nan(""), 0);
  EXPECT_THROW(matrix_exp(a), DomainError);
  EXPECT_THROW(matrix_exp(CMatrix::Zero(2, 3)), DomainError);
  EXPECT_THROW(unitary_from_hermitian(a, 1.0), DomainError);
}

TEST(Residuals, BlockHelpers) {
  CMatrix a = CMatrix::Zero(4, 4);
  a(3, 3) = 5.0;
  a(0, 1) = 2.0;
  EXPECT_EQ(max_abs_block(a, 4, 2), 2.0);
  EXPECT_EQ(column_residual(a, CMatrix::Zero(4, 4), 4), 5.0);
  a(2, 0) = I;
  EXPECT_EQ(hermiticity_residual(a), 2.0);
}
