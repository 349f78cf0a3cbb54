#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/ncmodel.hpp"
#include "ncdirac/phasepoly.hpp"

namespace ncdirac {

/// A time-dependent spinor matrix together with its derivative.
struct MatrixFunction {
  std::function<Mat2(double)> value;
  std::function<Mat2(double)> rate;

  static MatrixFunction constant(const Mat2& m) {
    return {[m](double) { return m; }, [](double) { return Mat2{}; }};
  }
};

/// Linear invariant I(t) = A1 px + B1 x + A2 py + B2 y + C.
struct InvariantAnsatz {
  MatrixFunction A1 = MatrixFunction::constant({});
  MatrixFunction B1 = MatrixFunction::constant({});
  MatrixFunction A2 = MatrixFunction::constant({});
  MatrixFunction B2 = MatrixFunction::constant({});
  MatrixFunction C = MatrixFunction::constant({});

  PhasePoly to_phasepoly(double t) const {
    PhasePoly p;
    p.lin(Coord::px) = A1.value(t);
    p.lin(Coord::x) = B1.value(t);
    p.lin(Coord::py) = A2.value(t);
    p.lin(Coord::y) = B2.value(t);
    p.constant = C.value(t);
    return p;
  }

  PhasePoly rate_phasepoly(double t) const {
    PhasePoly p;
    p.lin(Coord::px) = A1.rate(t);
    p.lin(Coord::x) = B1.rate(t);
    p.lin(Coord::py) = A2.rate(t);
    p.lin(Coord::y) = B2.rate(t);
    p.constant = C.rate(t);
    return p;
  }

  TimePhasePoly as_time_poly() const {
    return {[a = *this](double t) { return a.to_phasepoly(t); }, [a = *this](double t) { return a.rate_phasepoly(t); }};
  }
};

/// Real constants of the spin-free invariant a1 px + b1 x + a3 py + b3 y + c1.
struct InvariantConstants {
  double a1 = 0.0;
  double a3 = 0.0;
  double b1 = 0.0;
  double b3 = 0.0;
  double c1 = 0.0;
};

inline InvariantAnsatz build_paper_invariant(double a1, double a3, double b1, double b3, double c1) {
  const Mat2 one = Mat2::identity();
  InvariantAnsatz a;
  a.A1 = MatrixFunction::constant(a1 * one);
  a.A2 = MatrixFunction::constant(a3 * one);
  a.B1 = MatrixFunction::constant(b1 * one);
  a.B2 = MatrixFunction::constant(b3 * one);
  a.C = MatrixFunction::constant(c1 * one);
  return a;
}

inline InvariantAnsatz build_paper_invariant(const InvariantConstants& k) {
  return build_paper_invariant(k.a1, k.a3, k.b1, k.b3, k.c1);
}

/// [I, H] + i dI/dt at time t. The zero polynomial certifies I as a
/// Lewis-Riesenfeld invariant of H at that instant.
inline PhasePoly invariance_residual(const InvariantAnsatz& ans, const TimePhasePoly& h, const SymplecticForm& omega,
                                     double t) {
  return ps_commutator(ans.to_phasepoly(t), h(t), omega) + kI * ans.rate_phasepoly(t);
}

inline PhasePoly invariance_residual(const TimePhasePoly& inv, const TimePhasePoly& h, const SymplecticForm& omega,
                                     double t) {
  return ps_commutator(inv(t), h(t), omega) + kI * inv.rate(t);
}

/// Closed form of the residual for spin-free constant invariants:
///   i (a1 f_eta + b3 f_theta) a2 + i (b1 f_theta - a3 f_eta) a1  (hbar = 1).
inline Mat2 scalar_invariant_residual(const InvariantConstants& k, const NCParams& p, double t) {
  const double ft = f_theta(p, t);
  const double fe = f_eta(p, t);
  return (kI * (k.a1 * fe + k.b3 * ft)) * pauli::alpha2() + (kI * (k.b1 * ft - k.a3 * fe)) * pauli::alpha1();
}

struct LabeledResidual {
  std::string monomial;  // coefficient of this monomial in [I,H] + i dI/dt
  Mat2 value;
};

/// The fifteen matching conditions obtained by sorting [I,H] + i dI/dt by
/// monomial. Each entry is evaluated exactly in the bracket form used in the
/// hand derivation (ordering corrections folded into the constant entry).
struct ConstraintResidualSet {
  double t = 0.0;
  std::array<LabeledResidual, 15> entries;
  double max_norm = 0.0;

  const Mat2& operator[](const std::string& monomial) const {
    for (const auto& e : entries)
      if (e.monomial == monomial) return e.value;
    throw ParameterError("unknown constraint label: " + monomial);
  }
};

inline ConstraintResidualSet constraint_residuals(const InvariantAnsatz& ans, const NCParams& p, double t) {
  using namespace pauli;
  const Mat2 A1 = ans.A1.value(t), A2 = ans.A2.value(t), B1 = ans.B1.value(t), B2 = ans.B2.value(t),
             C = ans.C.value(t);
  const Mat2 dA1 = ans.A1.rate(t), dA2 = ans.A2.rate(t), dB1 = ans.B1.rate(t), dB2 = ans.B2.rate(t),
             dC = ans.C.rate(t);
  const Mat2 a1ft = f_theta(p, t) * alpha1(), a2ft = f_theta(p, t) * alpha2();
  const Mat2 a1fe = f_eta(p, t) * alpha1(), a2fe = f_eta(p, t) * alpha2();
  const Mat2 bm = p.m * beta();
  const double m = p.m;

  ConstraintResidualSet r;
  r.t = t;
  r.entries = {{
      {"px^2", commutator(A1, a1ft)},
      {"py^2", commutator(A2, a2ft)},
      {"x^2", commutator(B1, a2fe)},
      {"y^2", commutator(B2, a1fe)},
      {"px", m * commutator(A1, beta()) + commutator(C, a1ft) + kI * dA1},
      {"py", m * commutator(A2, beta()) + commutator(C, a2ft) + kI * dA2},
      {"x", m * commutator(B1, beta()) - commutator(C, a2fe) + kI * dB1},
      {"y", m * commutator(B2, beta()) + commutator(C, a1fe) + kI * dB2},
      {"px*py", commutator(A1, a2ft) + commutator(A2, a1ft)},
      {"x*px", commutator(B1, a1ft) - commutator(A1, a2fe)},
      {"x*py", commutator(B1, a2ft) - commutator(A2, a2fe)},
      {"x*y", commutator(B1, a1fe) - commutator(B2, a2fe)},
      {"y*px", commutator(B2, a1ft) + commutator(A1, a1fe)},
      {"y*py", commutator(A2, a1fe) + commutator(B2, a2ft)},
      {"1", kI * (A1 * a2fe) + kI * (B1 * a1ft) - kI * (A2 * a1fe) + kI * (B2 * a2ft) -
                kI * (commutator(B1, a1ft) + commutator(B2, a2ft)) + commutator(C, bm) + kI * dC},
  }};
  for (const auto& e : r.entries) r.max_norm = std::max(r.max_norm, e.value.frobenius_norm());
  return r;
}

/// Singular-value analysis of the conditions a1 f_eta + b3 f_theta = 0 and
/// b1 f_theta - a3 f_eta = 0 imposed at every grid time on constant
/// coefficients. Unknowns are ordered (a1, a3, b1, b3).
struct NullspaceReport {
  std::vector<double> times;
  Eigen::MatrixXd constraints;
  std::vector<double> singular_values;
  std::vector<Eigen::Vector4d> basis;       // orthonormal nullspace basis
  std::vector<Eigen::Vector4d> generators;  // same span, reduced row-echelon form
  int rank = 0;
  double tolerance = 0.0;

  int nullspace_dim() const { return static_cast<int>(basis.size()); }
  /// The invariant family with four free real constants plus c1 requires a
  /// 4-dimensional nullspace; anything smaller constrains those constants.
  bool free_constants_tension() const { return nullspace_dim() < 4; }
  std::string tension_note() const {
    if (nullspace_dim() == 0)
      return "only c1 survives: a1 = a3 = b1 = b3 = 0 is forced once f_eta/f_theta varies in time";
    if (nullspace_dim() < 4)
      return "the constants a1, a3, b1, b3 are not free: only a " + std::to_string(nullspace_dim()) +
             "-dimensional family satisfies the invariance condition";
    return "all four constants are free";
  }
};

inline constexpr double kNullspaceRelTol = 1e-10;

inline std::vector<double> uniform_grid(double t0, double t1, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  if (points == 1) {
    g[0] = t0;
    return g;
  }
  for (int k = 0; k < points; ++k) g[k] = t0 + (t1 - t0) * k / (points - 1);
  return g;
}

/// 16 uniform points on [0, 2 / max(gamma, 1)].
inline std::vector<double> default_constraint_grid(const NCParams& p) {
  return uniform_grid(0.0, 2.0 / std::max(std::abs(p.gamma), 1.0), 16);
}

namespace detail {

// Reduced row-echelon form of the rows of `rows` (k x 4), partial pivoting.
inline std::vector<Eigen::Vector4d> row_echelon(Eigen::MatrixXd rows, double tol = 1e-12) {
  const int k = static_cast<int>(rows.rows());
  int lead = 0;
  for (int col = 0; col < 4 && lead < k; ++col) {
    int piv = lead;
    for (int r = lead + 1; r < k; ++r)
      if (std::abs(rows(r, col)) > std::abs(rows(piv, col))) piv = r;
    if (std::abs(rows(piv, col)) <= tol) continue;
    rows.row(lead).swap(rows.row(piv));
    rows.row(lead) /= rows(lead, col);
    for (int r = 0; r < k; ++r)
      if (r != lead) rows.row(r) -= rows(r, col) * rows.row(lead);
    ++lead;
  }
  std::vector<Eigen::Vector4d> out;
  for (int r = 0; r < lead; ++r) out.emplace_back(rows.row(r).transpose());
  return out;
}

}  // namespace detail

inline NullspaceReport solve_constant_invariant(const NCParams& p, const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw GridError("solve_constant_invariant: need at least two grid times");
  NullspaceReport rep;
  rep.times = t_grid;
  const int n = static_cast<int>(t_grid.size());
  rep.constraints = Eigen::MatrixXd::Zero(2 * n, 4);
  for (int k = 0; k < n; ++k) {
    const double ft = f_theta(p, t_grid[k]);
    const double fe = f_eta(p, t_grid[k]);
    rep.constraints(2 * k, 0) = fe;  // a1 f_eta + b3 f_theta
    rep.constraints(2 * k, 3) = ft;
    rep.constraints(2 * k + 1, 1) = -fe;  // b1 f_theta - a3 f_eta
    rep.constraints(2 * k + 1, 2) = ft;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.constraints, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  rep.singular_values.assign(s.data(), s.data() + s.size());
  const double smax = s.size() > 0 ? s(0) : 0.0;
  rep.tolerance = kNullspaceRelTol * smax;
  rep.rank = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > rep.tolerance) ++rep.rank;
  const Eigen::MatrixXd& v = svd.matrixV();
  for (int k = rep.rank; k < 4; ++k) rep.basis.emplace_back(v.col(k));
  if (!rep.basis.empty()) {
    Eigen::MatrixXd rows(rep.basis.size(), 4);
    for (std::size_t k = 0; k < rep.basis.size(); ++k) rows.row(static_cast<Eigen::Index>(k)) = rep.basis[k];
    rep.generators = detail::row_echelon(rows);
  }
  return rep;
}

}  // namespace ncdirac
