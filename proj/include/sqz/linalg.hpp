#pragma once

// Dense complex matrix utilities: matrix exponential (scaling and squaring
// with Pade approximants), unitary exponentials of Hermitian generators, and
// residual norms restricted to leading column blocks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "sqz/errors.hpp"

namespace sqz {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace detail {

// Pade coefficients b_0..b_m of the [m/m] approximant to exp.
inline constexpr double kPade3[] = {120.0, 60.0, 12.0, 1.0};
inline constexpr double kPade5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
inline constexpr double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                    25200.0,    1512.0,    56.0,      1.0};
inline constexpr double kPade9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                    30270240.0,    2162160.0,    110880.0,     3960.0,
                                    90.0,          1.0};
inline constexpr double kPade13[] = {64764752532480000.0,
                                     32382376266240000.0,
                                     7771770303897600.0,
                                     1187353796428800.0,
                                     129060195264000.0,
                                     10559470521600.0,
                                     670442572800.0,
                                     33522128640.0,
                                     1323241920.0,
                                     40840800.0,
                                     960960.0,
                                     16380.0,
                                     182.0,
                                     1.0};

// Largest 1-norm for which the [m/m] approximant meets unit roundoff in
// double precision (Higham 2005).
inline constexpr double kTheta3 = 1.495585217958292e-2;
inline constexpr double kTheta5 = 2.539398330063230e-1;
inline constexpr double kTheta7 = 9.504178996162932e-1;
inline constexpr double kTheta9 = 2.097847961257068e0;
inline constexpr double kTheta13 = 5.371920351148152e0;

template <typename Mat>
double one_norm(const Mat& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// [m/m] approximant for odd m < 13; b holds b_0..b_m.
template <typename Mat, std::size_t Len>
Mat pade_low(const Mat& a, const double (&b)[Len]) {
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  // Horner in a^2: U = a * (odd-index terms), V = even-index terms.
  Mat u_poly = b[Len - 1] * ident;
  Mat v = b[Len - 2] * ident;
  for (std::size_t k = Len - 1; k >= 3; k -= 2) {
    u_poly = (a2 * u_poly).eval() + b[k - 2] * ident;
    v = (a2 * v).eval() + b[k - 3] * ident;
  }
  const Mat u = a * u_poly;
  return (v - u).partialPivLu().solve(v + u);
}

template <typename Mat>
Mat pade13(const Mat& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                      b[3] * a2 + b[1] * ident;
  const Mat u = a * u_inner;
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(A) for a square complex (or real) matrix.
///
/// Scaling and squaring with a degree 3..13 Pade approximant chosen from the
/// 1-norm. Relative accuracy about 1e-13 for normal matrices with norm up to
/// several hundred; throws DomainError on non-finite entries.
template <typename Derived>
typename Derived::PlainObject matrix_exp(const Eigen::MatrixBase<Derived>& input) {
  using Mat = typename Derived::PlainObject;
  if (input.rows() != input.cols()) throw DomainError("matrix_exp: matrix is not square");
  if (!input.allFinite()) throw DomainError("matrix_exp: non-finite entries");
  const Mat a = input;
  if (a.rows() == 0) return a;
  const double norm = detail::one_norm(a);
  if (norm <= detail::kTheta3) return detail::pade_low(a, detail::kPade3);
  if (norm <= detail::kTheta5) return detail::pade_low(a, detail::kPade5);
  if (norm <= detail::kTheta7) return detail::pade_low(a, detail::kPade7);
  if (norm <= detail::kTheta9) return detail::pade_low(a, detail::kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13))));
  const Mat scaled = a / std::ldexp(1.0, squarings);
  Mat result = detail::pade13(scaled);
  for (int i = 0; i < squarings; ++i) result = (result * result).eval();
  return result;
}

/// exp(-i theta H) for Hermitian H via its eigendecomposition. Only the
/// lower triangle of H is read.
inline CMatrix unitary_from_hermitian(const CMatrix& hermitian, double theta) {
  if (!hermitian.allFinite()) throw DomainError("unitary_from_hermitian: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian);
  if (eig.info() != Eigen::Success) throw DomainError("unitary_from_hermitian: eigensolver failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, -theta * lambda(i));
  }
  const CMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

/// max |A_ij| over rows < rows and columns < cols.
template <typename DerivedA>
double max_abs_block(const Eigen::MatrixBase<DerivedA>& a, Eigen::Index rows, Eigen::Index cols) {
  rows = std::min(rows, a.rows());
  cols = std::min(cols, a.cols());
  if (rows <= 0 || cols <= 0) return 0.0;
  return a.topLeftCorner(rows, cols).cwiseAbs().maxCoeff();
}

/// max |A_ij - B_ij| over every row and the first `cols` columns.
template <typename DerivedA, typename DerivedB>
double column_residual(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                       Eigen::Index cols) {
  const auto diff = (a - b).eval();
  return max_abs_block(diff, diff.rows(), cols);
}

/// max |A - A^dagger|.
inline double hermiticity_residual(const CMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace sqz
