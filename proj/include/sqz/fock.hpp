#pragma once

// Truncated Fock-space engine. Operators are dense N x N complex matrices in
// the number basis of the hidden oscillator. Identities that are exact in
// infinite dimension are checked on the inner columns n < N/2, where the
// truncation edge has not been reached.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sqz/algebra.hpp"
#include "sqz/analytic.hpp"
#include "sqz/core.hpp"
#include "sqz/linalg.hpp"

namespace sqz::fock {

inline constexpr Eigen::Index kMaxDim = 2048;
inline constexpr double kDefaultTailTolerance = 1e-10;

/// Sum of |c_n|^2 over the outer half n >= N/2 of a column or state.
inline double tail_mass(const CVector& v) {
  const Eigen::Index n = v.size();
  return v.tail(n - n / 2).squaredNorm();
}

struct FockOperator {
  CMatrix matrix;
  /// Outer-half weight of the operator's image of |0>; zero for operators
  /// that are not exponentials.
  double vacuum_tail_mass = 0.0;

  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix.rows(); }
  [[nodiscard]] bool truncation_adequate(double tol = kDefaultTailTolerance) const {
    return vacuum_tail_mass < tol;
  }
};

struct FockState {
  CVector amplitudes;

  [[nodiscard]] Eigen::Index dim() const noexcept { return amplitudes.size(); }
  [[nodiscard]] double norm() const { return amplitudes.norm(); }
  [[nodiscard]] double tail_mass() const { return fock::tail_mass(amplitudes); }
  [[nodiscard]] bool converged(double tol = kDefaultTailTolerance) const { return tail_mass() < tol; }
};

namespace detail {

inline void check_dim(Eigen::Index n) {
  if (n < 2 || n > kMaxDim) {
    throw DomainError("Fock truncation N=" + std::to_string(n) + " outside [2, 2048]");
  }
}

inline FockOperator exponential(CMatrix m) {
  FockOperator op{std::move(m), 0.0};
  op.vacuum_tail_mass = tail_mass(op.matrix.col(0));
  return op;
}

inline CMatrix lowering_matrix(Eigen::Index n) {
  CMatrix a = CMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// c1 (a^dag)^2 + c2 a^dag a + c3 a a^dag + c4 a^2 with every product taken
// between truncated N x N ladder matrices, filled entrywise. The truncated
// a a^dag has a zero in its last diagonal entry.
inline CMatrix ladder_quadratic(Eigen::Index n, cplx c1, cplx c2, cplx c3, cplx c4) {
  CMatrix q = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double di = static_cast<double>(i);
    q(i, i) = c2 * di + (i + 1 < n ? c3 * (di + 1.0) : cplx{});
    if (i + 2 < n) {
      const double r = std::sqrt((di + 1.0) * (di + 2.0));
      q(i + 2, i) = c1 * r;
      q(i, i + 2) = c4 * r;
    }
  }
  return q;
}

}  // namespace detail

/// Lowering operator a with a|n> = sqrt(n)|n-1>. The raising operator is
/// its adjoint.
inline FockOperator ladder(Eigen::Index n) {
  detail::check_dim(n);
  return {detail::lowering_matrix(n)};
}

inline FockOperator raising(Eigen::Index n) {
  detail::check_dim(n);
  return {detail::lowering_matrix(n).adjoint()};
}

/// x = sqrt(hbar / 2 m omega) (a + a^dag).
inline FockOperator position_op(Eigen::Index n, const PhysParams& params) {
  detail::check_dim(n);
  const CMatrix a = detail::lowering_matrix(n);
  return {std::sqrt(params.sigma0_sq()) * (a + a.adjoint())};
}

/// p = sqrt(hbar m omega / 2) (a - a^dag) / i.
inline FockOperator momentum_op(Eigen::Index n, const PhysParams& params) {
  detail::check_dim(n);
  const CMatrix a = detail::lowering_matrix(n);
  return {-I * std::sqrt(params.hbar() * params.mass() * params.omega() / 2.0) * (a - a.adjoint())};
}

/// p^2 / 2m written in ladder operators:
/// -(hbar omega / 4) ((a^dag)^2 - a^dag a - a a^dag + a^2).
inline FockOperator free_hamiltonian(Eigen::Index n, const PhysParams& params) {
  detail::check_dim(n);
  return {-(params.hbar() * params.omega() / 4.0) * detail::ladder_quadratic(n, 1.0, -1.0, -1.0, 1.0)};
}

/// D(x0, p0) = exp(-(i/hbar)(x0 p - p0 x)). Keep N >= 16 + 8|alpha|^2.
inline FockOperator displacement_op(Eigen::Index n, const PhysParams& params, const Displacement& d) {
  d.validate();
  const CMatrix x = position_op(n, params).matrix;
  const CMatrix p = momentum_op(n, params).matrix;
  return detail::exponential(matrix_exp((-I / params.hbar()) * (d.x0 * p - d.p0 * x)));
}

/// S(xi, eta) = exp(-(xi/2)(a^dag)^2 + i(eta/2)(a^dag a + a a^dag) + (xi^*/2) a^2).
inline FockOperator squeeze_general(Eigen::Index n, cplx xi, double eta) {
  detail::check_dim(n);
  if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag()) || !std::isfinite(eta)) {
    throw DomainError("squeeze_general: non-finite parameters");
  }
  const CMatrix gen = detail::ladder_quadratic(n, -xi / 2.0, I * eta / 2.0, I * eta / 2.0, std::conj(xi) / 2.0);
  return detail::exponential(matrix_exp(gen));
}

namespace detail {

// exp(-i theta H) for a real symmetric H that couples only levels of equal
// parity. Each parity block is diagonalized on its own.
inline CMatrix parity_block_unitary(const Eigen::MatrixXd& h, double theta) {
  const Eigen::Index n = h.rows();
  CMatrix u = CMatrix::Zero(n, n);
  for (Eigen::Index parity = 0; parity < 2; ++parity) {
    const Eigen::Index m = (n - parity + 1) / 2;
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) block(i, j) = h(2 * i + parity, 2 * j + parity);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block);
    if (eig.info() != Eigen::Success) throw DomainError("free evolution: eigensolver failed");
    CVector phases(m);
    for (Eigen::Index i = 0; i < m; ++i) phases(i) = std::polar(1.0, -theta * eig.eigenvalues()(i));
    const CMatrix v = eig.eigenvectors().cast<cplx>();
    const CMatrix ub = v * phases.asDiagonal() * v.transpose();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) u(2 * i + parity, 2 * j + parity) = ub(i, j);
  }
  return u;
}

}  // namespace detail

/// exp(-(i/hbar) H t) from the spectral decomposition of free_hamiltonian.
/// H is real and preserves parity, so the even and odd levels are
/// diagonalized separately. Widely spread states need N beyond the default
/// 256 once omega t > 4.
inline FockOperator free_evolution_op(Eigen::Index n, const PhysParams& params, double t) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("free_evolution_op: t must be finite and >= 0");
  const Eigen::MatrixXd h = free_hamiltonian(n, params).matrix.real();
  return detail::exponential(detail::parity_block_unitary(h, t / params.hbar()));
}

/// (a^dag)^n / sqrt(n!) |0>, i.e. the basis vector e_n. Requires n < N/2.
inline FockState fock_state(Eigen::Index dim, Eigen::Index n) {
  detail::check_dim(dim);
  if (n < 0 || n >= dim / 2) {
    throw DomainError("fock_state: level " + std::to_string(n) + " not in the inner half of N=" +
                      std::to_string(dim));
  }
  FockState s{CVector::Zero(dim)};
  s.amplitudes(n) = 1.0;
  return s;
}

inline FockState apply(const FockOperator& op, const FockState& state) {
  if (op.dim() != state.dim()) throw DomainError("apply: dimension mismatch");
  return {op.matrix * state.amplitudes};
}

inline cplx expectation(const FockOperator& op, const FockState& state) {
  if (op.dim() != state.dim()) throw DomainError("expectation: dimension mismatch");
  return state.amplitudes.dot(op.matrix * state.amplitudes);
}

/// <A^2> - <A>^2 for Hermitian A.
inline double variance(const FockOperator& op, const FockState& state) {
  const CVector av = op.matrix * state.amplitudes;
  const double mean = state.amplitudes.dot(av).real();
  return av.squaredNorm() - mean * mean;
}

struct GridReconstruction {
  std::vector<cplx> values;
  double tail_mass = 0.0;
  bool converged = true;
  std::string warning;
};

/// Position wavefunction sum_n c_n <x|n> at the requested points.
inline GridReconstruction wavefunction_on_grid(const FockState& state, std::span<const double> xs,
                                               const PhysParams& params,
                                               double tail_tol = kDefaultTailTolerance) {
  GridReconstruction out;
  out.tail_mass = state.tail_mass();
  out.converged = out.tail_mass < tail_tol;
  if (!out.converged) {
    out.warning = "state not converged: outer-half weight " + std::to_string(out.tail_mass) +
                  " exceeds " + std::to_string(tail_tol) + "; increase N";
  }
  const int nmax = static_cast<int>(state.dim()) - 1;
  const double ell = params.length_scale();
  const double scale = 1.0 / std::sqrt(ell);
  out.values.reserve(xs.size());
  for (double x : xs) {
    const auto h = analytic::hermite_functions(nmax, x / ell);
    cplx acc{};
    for (int k = 0; k <= nmax; ++k) acc += state.amplitudes(k) * h[static_cast<std::size_t>(k)];
    out.values.push_back(acc * scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator-identity checks.

struct BraidingReport {
  Eigen::Index dim = 0;
  double p0 = 0.0;
  double residual = 0.0;  // max |D_ij| over columns j < N/2
  /// Size of double-precision rounding in D, 100 eps sqrt(N hbar m omega)
  /// max(1, |p0| / sqrt(hbar m omega)). Truncation error below this level
  /// cannot be resolved.
  double roundoff_floor = 0.0;
};

/// Conjugation of p by the momentum kick exp(i p0 x / hbar):
///   D = exp(-i p0 x/hbar) p exp(i p0 x/hbar) - (p + p0).
inline BraidingReport verify_braiding(Eigen::Index n, const PhysParams& params, double p0) {
  if (n < 64) throw DomainError("verify_braiding: N must be at least 64");
  detail::check_dim(n);
  const CMatrix x = position_op(n, params).matrix;
  const CMatrix p = momentum_op(n, params).matrix;
  // exp(i p0 x / hbar) == exp(-i theta x) with theta = -p0 / hbar.
  const CMatrix kick = unitary_from_hermitian(x, -p0 / params.hbar());
  const CMatrix conj = kick.adjoint() * p * kick;
  const CMatrix diff = conj - (p + p0 * CMatrix::Identity(n, n));
  const double q = params.momentum_scale();
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * std::sqrt(double(n)) * q *
                       std::max(1.0, std::abs(p0) / q);
  return {n, p0, p0 == 0.0 ? 0.0 : max_abs_block(diff, n, n / 2), floor};
}

struct DisentanglingReport {
  Eigen::Index dim = 0;
  Eigen::Index working_dim = 0;
  cplx k{};
  algebra::Branch branch = algebra::Branch::Minus;
  double residual = 0.0;         // max |LHS - RHS| over columns j < N/2
  double vacuum_residual = 0.0;  // LHS column 0 against prefactor exp(coeff (a^dag)^2)|0>
};

namespace detail {

using qreal = boost::multiprecision::cpp_bin_float_quad;
using qcplx = boost::multiprecision::cpp_complex_quad;

// exp(coeff (a^dag)^2) exp(-(1/2) log(d) (a^dag a + a a^dag)) exp(coeff a^2),
// columns j < cols and rows < rows. Each factor has closed-form matrix
// elements,
//   <l + 2m| exp(coeff (a^dag)^2) |l> = coeff^m / m! sqrt((l + 2m)! / l!),
// and the product is summed in quad precision: for |k| near 1/2 the
// intermediate terms reach ~1e11 while the result is O(1).
inline CMatrix disentangled_product(cplx k, algebra::Branch br, Eigen::Index rows, Eigen::Index cols) {
  const qcplx iq(qreal(0), qreal(1));
  const qcplx kq(qreal(k.real()), qreal(k.imag()));
  const qcplx d = qcplx(qreal(1)) - qreal(algebra::sign(br) * 2) * iq * kq;
  const qcplx coeff = iq * kq / d;
  const qcplx log_d = log(d);

  // raise[l][m] = <l+2m| exp(coeff (a^dag)^2) |l>
  std::vector<std::vector<qcplx>> raise(static_cast<std::size_t>(rows));
  std::vector<qcplx> diag(static_cast<std::size_t>(rows));
  for (Eigen::Index l = 0; l < rows; ++l) {
    auto& col = raise[static_cast<std::size_t>(l)];
    const Eigen::Index mmax = (rows - 1 - l) / 2;
    col.resize(static_cast<std::size_t>(mmax) + 1);
    col[0] = qcplx(qreal(1));
    for (Eigen::Index m = 0; m < mmax; ++m) {
      const qreal grow = sqrt(qreal(l + 2 * m + 1) * qreal(l + 2 * m + 2)) / qreal(m + 1);
      col[static_cast<std::size_t>(m) + 1] = col[static_cast<std::size_t>(m)] * coeff * grow;
    }
    diag[static_cast<std::size_t>(l)] = exp(-(qreal(l) + qreal(0.5)) * log_d);
  }

  CMatrix out = CMatrix::Zero(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = j % 2; i < rows; i += 2) {
      qcplx acc(qreal(0));
      for (Eigen::Index l = j % 2; l <= std::min(i, j); l += 2) {
        const auto& col = raise[static_cast<std::size_t>(l)];
        acc += col[static_cast<std::size_t>((i - l) / 2)] * diag[static_cast<std::size_t>(l)] *
               col[static_cast<std::size_t>((j - l) / 2)];
      }
      out(i, j) = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
  }
  return out;
}

}  // namespace detail

/// Checks exp(ik (a^dag +- a)^2) against its disentangled product on the
/// columns n < N/2.
///
/// The left side is exponentiated in a working dimension of 4N and its
/// leading N x N block kept, so the truncation edge does not feed back into
/// the inner columns. N is limited to 512.
///
/// Complex k is accepted on the side where the operator is bounded
/// (Im k <= 0 for Minus, Im k >= 0 for Plus); on the other side
/// exp(ik (a^dag +- a)^2) is unbounded and no truncation converges.
inline DisentanglingReport verify_disentangling(Eigen::Index n, cplx k, algebra::Branch br) {
  detail::check_dim(n);
  if (n > kMaxDim / 4) throw DomainError("verify_disentangling: N must be at most 512");
  if (double(algebra::sign(br)) * k.imag() < 0.0) {
    throw DomainError("verify_disentangling: exp(ik (a^dag +- a)^2) is unbounded for this sign of Im k");
  }
  const auto vac = algebra::vacuum_action(k, br);  // rejects poles

  DisentanglingReport rep;
  rep.dim = n;
  rep.working_dim = 4 * n;
  rep.k = k;
  rep.branch = br;
  if (k == cplx{}) return rep;

  const Eigen::Index w = rep.working_dim;
  const double sg = double(algebra::sign(br));
  const CMatrix sq = detail::ladder_quadratic(w, 1.0, sg, sg, 1.0);  // (a^dag +- a)^2
  CMatrix lhs_full = k.imag() == 0.0 ? unitary_from_hermitian(sq, -k.real()) : matrix_exp(I * k * sq);
  const CMatrix lhs = lhs_full.topLeftCorner(n, n);

  const CMatrix rhs = detail::disentangled_product(k, br, n, n / 2);
  rep.residual = column_residual(lhs.leftCols(n / 2), rhs, n / 2);

  cplx term = vac.prefactor;
  double worst = 0.0;
  for (Eigen::Index m = 0; 2 * m < n; ++m) {
    if (m > 0) term *= vac.creation_coefficient * std::sqrt((2.0 * m - 1.0) * (2.0 * m)) / double(m);
    worst = std::max(worst, std::abs(lhs(2 * m, 0) - term));
    if (2 * m + 1 < n) worst = std::max(worst, std::abs(lhs(2 * m + 1, 0)));
  }
  rep.vacuum_residual = worst;
  return rep;
}

}  // namespace sqz::fock
