#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/mat2.hpp"

namespace ncdirac {

/// Canonical phase-space coordinates, in key order.
enum class Coord : int { x = 0, y = 1, px = 2, py = 3 };

inline constexpr std::array<Coord, 4> kCoords{Coord::x, Coord::y, Coord::px, Coord::py};

inline const char* coord_name(Coord c) {
  switch (c) {
    case Coord::x: return "x";
    case Coord::y: return "y";
    case Coord::px: return "px";
    default: return "py";
  }
}

inline constexpr int idx(Coord c) { return static_cast<int>(c); }

/// [z_i, z_j] = i * omega(i, j). Antisymmetric by construction.
class SymplecticForm {
 public:
  /// Canonical form [x,px] = [y,py] = i*hbar, everything else commuting.
  explicit SymplecticForm(double hbar = 1.0) {
    set(Coord::x, Coord::px, hbar);
    set(Coord::y, Coord::py, hbar);
  }

  double operator()(int i, int j) const { return w_[i][j]; }
  double operator()(Coord a, Coord b) const { return w_[idx(a)][idx(b)]; }

  void set(Coord a, Coord b, double v) {
    w_[idx(a)][idx(b)] = v;
    w_[idx(b)][idx(a)] = -v;
  }

 private:
  std::array<std::array<double, 4>, 4> w_{};
};

/// Polynomial of degree <= 2 in (x, y, px, py) with Mat2 coefficients.
/// Quadratic slots hold Weyl-ordered monomials: the key (i, j) stands for
/// (z_i z_j + z_j z_i) / 2, which makes the representation unique.
struct PhasePoly {
  static constexpr int kQuadSlots = 10;

  Mat2 constant{};
  std::array<Mat2, 4> linear{};
  std::array<Mat2, kQuadSlots> quadratic{};

  static constexpr int quad_index(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * 4 - i * (i - 1) / 2 + (j - i);
  }
  static constexpr int quad_index(Coord a, Coord b) { return quad_index(idx(a), idx(b)); }

  /// Inverse of quad_index.
  static constexpr std::pair<int, int> quad_pair(int slot) {
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        if (quad_index(i, j) == slot) return {i, j};
    return {-1, -1};
  }

  static PhasePoly constant_term(const Mat2& m) {
    PhasePoly p;
    p.constant = m;
    return p;
  }
  static PhasePoly monomial(Coord c, const Mat2& m = Mat2::identity()) {
    PhasePoly p;
    p.linear[idx(c)] = m;
    return p;
  }
  static PhasePoly monomial(Coord a, Coord b, const Mat2& m = Mat2::identity()) {
    PhasePoly p;
    p.quadratic[quad_index(a, b)] = m;
    return p;
  }

  Mat2& lin(Coord c) { return linear[idx(c)]; }
  const Mat2& lin(Coord c) const { return linear[idx(c)]; }
  Mat2& quad(Coord a, Coord b) { return quadratic[quad_index(a, b)]; }
  const Mat2& quad(Coord a, Coord b) const { return quadratic[quad_index(a, b)]; }

  bool has_quadratic() const {
    for (const auto& q : quadratic)
      if (q != Mat2{}) return true;
    return false;
  }

  template <typename F>
  void for_each_slot(F&& f) const {
    f(constant);
    for (const auto& m : linear) f(m);
    for (const auto& m : quadratic) f(m);
  }
  template <typename F>
  void transform_slots(F&& f) {
    constant = f(constant);
    for (auto& m : linear) m = f(m);
    for (auto& m : quadratic) m = f(m);
  }

  PhasePoly& operator+=(const PhasePoly& o) {
    constant += o.constant;
    for (int k = 0; k < 4; ++k) linear[k] += o.linear[k];
    for (int k = 0; k < kQuadSlots; ++k) quadratic[k] += o.quadratic[k];
    return *this;
  }
  PhasePoly& operator-=(const PhasePoly& o) {
    constant -= o.constant;
    for (int k = 0; k < 4; ++k) linear[k] -= o.linear[k];
    for (int k = 0; k < kQuadSlots; ++k) quadratic[k] -= o.quadratic[k];
    return *this;
  }
  PhasePoly& operator*=(cplx s) {
    transform_slots([s](const Mat2& m) { return m * s; });
    return *this;
  }

  bool operator==(const PhasePoly&) const = default;
};

inline PhasePoly operator+(PhasePoly a, const PhasePoly& b) { return a += b; }
inline PhasePoly operator-(PhasePoly a, const PhasePoly& b) { return a -= b; }
inline PhasePoly operator*(PhasePoly a, cplx s) { return a *= s; }
inline PhasePoly operator*(cplx s, PhasePoly a) { return a *= s; }

/// Left-multiplies every coefficient by a spinor matrix.
inline PhasePoly operator*(const Mat2& m, PhasePoly p) {
  p.transform_slots([&m](const Mat2& c) { return m * c; });
  return p;
}

inline PhasePoly ps_linear_combine(const std::vector<std::pair<cplx, PhasePoly>>& terms) {
  PhasePoly out;
  for (const auto& [s, p] : terms) out += s * p;
  return out;
}

/// Exact operator commutator of two polynomials of degree <= 1:
///   [M_i z_i, N_j z_j] = [M_i, N_j] S(z_i z_j) + (i/2) omega_ij {M_i, N_j}
/// plus the linear and constant cross terms.
inline PhasePoly ps_commutator(const PhasePoly& p, const PhasePoly& q, const SymplecticForm& omega) {
  if (p.has_quadratic() || q.has_quadratic())
    throw DegreeError("ps_commutator: operands must have degree <= 1");
  PhasePoly r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Mat2& m = p.linear[i];
      const Mat2& n = q.linear[j];
      r.quadratic[PhasePoly::quad_index(i, j)] += commutator(m, n);
      const double w = omega(i, j);
      if (w != 0.0) r.constant += (0.5 * w * kI) * anticommutator(m, n);
    }
    r.linear[i] += commutator(p.linear[i], q.constant);
    r.linear[i] += commutator(p.constant, q.linear[i]);
  }
  r.constant += commutator(p.constant, q.constant);
  return r;
}

/// Largest Frobenius norm over the 15 coefficient slots.
inline double ps_residual_norm(const PhasePoly& p) {
  double n = 0.0;
  p.for_each_slot([&n](const Mat2& m) { n = std::max(n, m.frobenius_norm()); });
  return n;
}

/// Largest slot-wise ||C - C^dagger||. Zero certifies a Hermitian operator,
/// since every Weyl-ordered monomial is itself Hermitian.
inline double ps_hermitian_check(const PhasePoly& p) {
  double n = 0.0;
  p.for_each_slot([&n](const Mat2& m) { n = std::max(n, (m - m.adjoint()).frobenius_norm()); });
  return n;
}

/// Largest spin-dependent Pauli coefficient over all slots.
inline double ps_spin_dependence(const PhasePoly& p) {
  double n = 0.0;
  p.for_each_slot([&n](const Mat2& m) { n = std::max(n, pauli_decompose(m).spin_part()); });
  return n;
}

inline std::string slot_label(int slot) {
  if (slot == 0) return "1";
  if (slot <= 4) return coord_name(kCoords[slot - 1]);
  auto [i, j] = PhasePoly::quad_pair(slot - 5);
  if (i == j) return std::string(coord_name(kCoords[i])) + "^2";
  return std::string(coord_name(kCoords[i])) + "*" + coord_name(kCoords[j]);
}

/// Time-dependent polynomial with an analytic time derivative.
struct TimePhasePoly {
  std::function<PhasePoly(double)> value;
  std::function<PhasePoly(double)> rate;

  PhasePoly operator()(double t) const { return value(t); }

  static TimePhasePoly constant(PhasePoly p) {
    return {[p](double) { return p; }, [](double) { return PhasePoly{}; }};
  }
};

}  // namespace ncdirac
