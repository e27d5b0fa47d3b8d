#pragma once

// The symplectic Lie algebra spanned by
//   K0 = (a^dag a + a a^dag)/4,  K+ = (a^dag)^2/2,  K- = a^2/2
// with [K0, K+-] = +-K+-, [K+, K-] = -2 K0, its faithful 2x2 representation,
// and the disentangling of exp(ik (a^dag +- a)^2) into
// exp(a K+) exp(b K0) exp(c K-).

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sqz/core.hpp"

namespace sqz::algebra {

/// Which member of the simplified squeezing family exp(ik (a^dag +- a)^2).
/// Minus is the momentum-squared form used by free evolution; Plus is the
/// position-squared form.
enum class Branch { Plus, Minus };

constexpr int sign(Branch b) noexcept { return b == Branch::Plus ? 1 : -1; }

inline const char* to_string(Branch b) noexcept { return b == Branch::Plus ? "+" : "-"; }

using Rational = boost::rational<long long>;
using RationalMatrix = std::array<std::array<Rational, 2>, 2>;
using Matrix2c = Eigen::Matrix2cd;

inline RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
  RationalMatrix r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

inline RationalMatrix operator+(const RationalMatrix& x, const RationalMatrix& y) {
  RationalMatrix r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][j] + y[i][j];
  return r;
}

inline RationalMatrix operator*(Rational s, const RationalMatrix& x) {
  RationalMatrix r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = s * x[i][j];
  return r;
}

inline RationalMatrix operator-(const RationalMatrix& x, const RationalMatrix& y) {
  return x + Rational(-1) * y;
}

inline RationalMatrix commutator(const RationalMatrix& x, const RationalMatrix& y) {
  return x * y - y * x;
}

inline bool is_zero(const RationalMatrix& x) {
  for (const auto& row : x)
    for (const auto& v : row)
      if (v.numerator() != 0) return false;
  return true;
}

/// Faithful 2x2 representation of K0, K+, K-.
struct Rep2x2 {
  RationalMatrix k0{{{Rational(-1, 2), Rational(0)}, {Rational(0), Rational(1, 2)}}};
  RationalMatrix k_plus{{{Rational(0), Rational(0)}, {Rational(-1), Rational(0)}}};
  RationalMatrix k_minus{{{Rational(0), Rational(1)}, {Rational(0), Rational(0)}}};

  /// M = K+ +- 2 K0 + K-, the image of (a^dag +- a)^2 / 2.
  [[nodiscard]] RationalMatrix m(Branch b) const {
    return k_plus + Rational(2 * sign(b)) * k0 + k_minus;
  }
};

struct CommutatorCheck {
  std::string identity;
  RationalMatrix residual{};
  [[nodiscard]] bool exact_zero() const { return is_zero(residual); }
};

struct CommutatorReport {
  std::array<CommutatorCheck, 3> checks;
  [[nodiscard]] bool all_zero() const {
    for (const auto& c : checks)
      if (!c.exact_zero()) return false;
    return true;
  }
};

/// Evaluates [K0,K+] - K+, [K0,K-] + K-, [K+,K-] + 2K0 exactly.
inline CommutatorReport verify_rep_commutators(const Rep2x2& rep = {}) {
  CommutatorReport report;
  report.checks[0] = {"[K0,K+] - K+", commutator(rep.k0, rep.k_plus) - rep.k_plus};
  report.checks[1] = {"[K0,K-] + K-", commutator(rep.k0, rep.k_minus) + rep.k_minus};
  report.checks[2] = {"[K+,K-] + 2K0",
                      commutator(rep.k_plus, rep.k_minus) + Rational(2) * rep.k0};
  return report;
}

/// M^2 for the given branch, exactly; zero because M is nilpotent.
inline RationalMatrix nilpotency_residual(Branch b, const Rep2x2& rep = {}) {
  const auto m = rep.m(b);
  return m * m;
}

inline Matrix2c to_complex(const RationalMatrix& x) {
  Matrix2c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = static_cast<double>(x[i][j].numerator()) / static_cast<double>(x[i][j].denominator());
  return r;
}

/// exp(2ik M) = I + 2ik M, exact because M^2 = 0.
inline Matrix2c exp_simplified_squeeze_2x2(cplx k, Branch b) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw DomainError("k must be finite");
  return Matrix2c::Identity() + 2.0 * I * k * to_complex(Rep2x2{}.m(b));
}

/// The denominator 1 -/+ 2ik (upper sign for Plus).
inline cplx pole_factor(cplx k, Branch b) { return 1.0 - double(sign(b)) * 2.0 * I * k; }

/// True when 1 -/+ 2ik has positive real part, so principal log and square
/// root involve no branch choice.
inline bool on_principal_sheet(cplx k, Branch b) { return pole_factor(k, b).real() > 0.0; }

namespace detail {
inline cplx checked_pole_factor(cplx k, Branch b) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw DomainError("k must be finite");
  const cplx d = pole_factor(k, b);
  if (std::abs(d) < 1e-14) {
    std::ostringstream os;
    os.precision(17);
    os << "disentangling pole: 1 " << (b == Branch::Plus ? "-" : "+") << " 2ik = 0 at k = ("
       << k.real() << ", " << k.imag() << ")";
    throw SingularityError(os.str());
  }
  return d;
}
}  // namespace detail

/// Coefficients of exp(2ik M) = exp(a K+) exp(b K0) exp(c K-):
/// a = c = 2ik/(1 -/+ 2ik), b = -2 log(1 -/+ 2ik), and the vacuum prefactor
/// (1 -/+ 2ik)^(-1/2). Principal branches throughout.
struct DisentangledFactors {
  cplx a{};
  cplx b{};
  cplx c{};
  cplx prefactor{1.0, 0.0};
};

inline DisentangledFactors disentangle_factors(cplx k, Branch br) {
  const cplx d = detail::checked_pole_factor(k, br);
  DisentangledFactors f;
  f.a = 2.0 * I * k / d;
  f.c = f.a;
  f.b = -2.0 * std::log(d);
  f.prefactor = 1.0 / std::sqrt(d);
  return f;
}

/// exp(a K+) exp(b K0) exp(c K-) in the 2x2 representation.
inline Matrix2c reassemble_2x2(const DisentangledFactors& f) {
  const cplx lo = std::exp(-f.b / 2.0);
  const cplx hi = std::exp(f.b / 2.0);
  Matrix2c r;
  r << lo, f.c * lo, -f.a * lo, -f.a * f.c * lo + hi;
  return r;
}

/// exp(ik (a^dag +- a)^2)|0> = prefactor * exp(coeff (a^dag)^2)|0>.
struct VacuumAction {
  cplx prefactor{1.0, 0.0};
  cplx creation_coefficient{};
};

inline VacuumAction vacuum_action(cplx k, Branch br) {
  const cplx d = detail::checked_pole_factor(k, br);
  return {1.0 / std::sqrt(d), I * k / d};
}

/// Squeezing parameters of a unitary exp(-(xi/2)(a^dag)^2 + i(eta/2)(a^dag a + a a^dag) + (xi^*/2) a^2)
/// together with its simplified-family label when xi == i eta.
struct SqueezeParams {
  cplx xi{};
  double eta = 0.0;
  cplx k{};
  Branch branch = Branch::Minus;
};

/// Free evolution over time t is the squeeze with xi = -i omega t/2,
/// eta = -omega t/2, i.e. the Minus family at k = omega t/4.
inline SqueezeParams free_evolution_squeeze_params(double t, double omega) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("free evolution needs finite t >= 0");
  sqz::detail::require_positive_finite(omega, "omega");
  const double wt = omega * t;
  SqueezeParams s{cplx{0.0, -wt / 2.0}, -wt / 2.0, cplx{wt / 4.0, 0.0}, Branch::Minus};
  if (!on_principal_sheet(s.k, s.branch)) throw std::logic_error("free evolution left the principal sheet");
  return s;
}

/// k' = omega t / (4 (1 + i omega t)): the Plus-family label that turns the
/// squeezed vacuum into exp(const * x^2)|0>.
inline cplx position_stage_k(double omega_t) {
  const cplx k = omega_t / (4.0 * cplx{1.0, omega_t});
  if (!on_principal_sheet(k, Branch::Plus)) throw std::logic_error("position stage left the principal sheet");
  return k;
}

/// i omega t / (4 + 2 i omega t): the (a^dag)^2 coefficient of the freely
/// evolved vacuum.
inline cplx free_evolution_vacuum_coefficient(double omega_t) {
  return I * omega_t / cplx{4.0, 2.0 * omega_t};
}

}  // namespace sqz::algebra
