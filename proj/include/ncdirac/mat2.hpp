#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace ncdirac {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Complex 2x2 matrix in row-major order. Spinor-space coefficients of every
/// operator in the library are Mat2 values.
struct Mat2 {
  std::array<cplx, 4> e{};

  constexpr Mat2() = default;
  constexpr Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : e{a00, a01, a10, a11} {}

  constexpr cplx& operator()(int r, int c) { return e[2 * r + c]; }
  constexpr const cplx& operator()(int r, int c) const { return e[2 * r + c]; }

  static constexpr Mat2 zero() { return {}; }
  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 scalar(cplx s) { return {s, 0.0, 0.0, s}; }

  Mat2& operator+=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) e[k] += o.e[k];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) e[k] -= o.e[k];
    return *this;
  }
  Mat2& operator*=(cplx s) {
    for (auto& v : e) v *= s;
    return *this;
  }

  Mat2 adjoint() const { return {std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}; }
  cplx trace() const { return e[0] + e[3]; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : e) s += std::norm(v);
    return std::sqrt(s);
  }

  bool operator==(const Mat2&) const = default;
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator-(Mat2 a) { return a *= -1.0; }
inline Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
inline Mat2 operator*(cplx s, Mat2 a) { return a *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
          a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]};
}

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }
inline Mat2 anticommutator(const Mat2& a, const Mat2& b) { return a * b + b * a; }

inline double max_abs_diff(const Mat2& a, const Mat2& b) { return (a - b).frobenius_norm(); }

namespace pauli {

inline constexpr Mat2 identity() { return Mat2::identity(); }
inline constexpr Mat2 sigma1() { return {0.0, 1.0, 1.0, 0.0}; }
inline constexpr Mat2 sigma2() { return {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}; }
inline constexpr Mat2 sigma3() { return {1.0, 0.0, 0.0, -1.0}; }

// Dirac matrices of the planar problem: alpha_1 = sigma_1, alpha_2 = sigma_2,
// beta = sigma_3.
inline constexpr Mat2 alpha1() { return sigma1(); }
inline constexpr Mat2 alpha2() { return sigma2(); }
inline constexpr Mat2 beta() { return sigma3(); }

inline Mat2 sigma(int a) {
  switch (a) {
    case 0: return identity();
    case 1: return sigma1();
    case 2: return sigma2();
    default: return sigma3();
  }
}

}  // namespace pauli

/// Expansion M = c_I*1 + c_1*sigma_1 + c_2*sigma_2 + c_3*sigma_3.
struct PauliCoeffs {
  cplx c_I{};
  cplx c_1{};
  cplx c_2{};
  cplx c_3{};

  // Largest magnitude among the spin-dependent coefficients.
  double spin_part() const { return std::max({std::abs(c_1), std::abs(c_2), std::abs(c_3)}); }
};

/// Trace formulas c_a = Tr(sigma_a M) / 2.
inline PauliCoeffs pauli_decompose(const Mat2& m) {
  return {0.5 * m.trace(), 0.5 * (pauli::sigma1() * m).trace(), 0.5 * (pauli::sigma2() * m).trace(),
          0.5 * (pauli::sigma3() * m).trace()};
}

inline Mat2 pauli_compose(const PauliCoeffs& c) {
  return c.c_I * pauli::identity() + c.c_1 * pauli::sigma1() + c.c_2 * pauli::sigma2() + c.c_3 * pauli::sigma3();
}

struct AlgebraCheck {
  std::string relation;
  double deviation = 0.0;
};

struct DiracAlgebraReport {
  std::vector<AlgebraCheck> checks;
  double tolerance = 1e-14;

  double max_deviation() const {
    double d = 0.0;
    for (const auto& c : checks) d = std::max(d, c.deviation);
    return d;
  }
  bool passed() const { return max_deviation() <= tolerance; }
};

/// Checks the nine Clifford relations {a_i,a_j} = 2 delta_ij, {a_i,b} = 0 and
/// a_i^2 = b^2 = 1 on the given matrices.
inline DiracAlgebraReport verify_dirac_algebra(const Mat2& a1 = pauli::alpha1(), const Mat2& a2 = pauli::alpha2(),
                                               const Mat2& b = pauli::beta(), double tolerance = 1e-14) {
  const Mat2 one = Mat2::identity();
  const Mat2 two = Mat2::scalar(2.0);
  const Mat2 zero{};
  DiracAlgebraReport r;
  r.tolerance = tolerance;
  r.checks = {
      {"{alpha1,alpha1}=2", max_abs_diff(anticommutator(a1, a1), two)},
      {"{alpha2,alpha2}=2", max_abs_diff(anticommutator(a2, a2), two)},
      {"{alpha1,alpha2}=0", max_abs_diff(anticommutator(a1, a2), zero)},
      {"{alpha2,alpha1}=0", max_abs_diff(anticommutator(a2, a1), zero)},
      {"{alpha1,beta}=0", max_abs_diff(anticommutator(a1, b), zero)},
      {"{alpha2,beta}=0", max_abs_diff(anticommutator(a2, b), zero)},
      {"alpha1^2=1", max_abs_diff(a1 * a1, one)},
      {"alpha2^2=1", max_abs_diff(a2 * a2, one)},
      {"beta^2=1", max_abs_diff(b * b, one)},
  };
  return r;
}

}  // namespace ncdirac
