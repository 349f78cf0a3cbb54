#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/phasepoly.hpp"

namespace ncdirac {

enum class UnitMode { natural, si };

inline constexpr double kSpeedOfLightSI = 299792458.0;
inline constexpr double kConsistencyWarnThreshold = 1e-2;

/// Physical and model parameters of the planar Dirac problem.
struct NCParams {
  double theta = 0.0;  // position noncommutativity, length^2
  double eta = 0.0;    // momentum noncommutativity, momentum^2
  double gamma = 0.0;  // growth rate of theta(t), inverse time
  double B = 1.0;
  double e = 1.0;  // signed charge
  double m = 1.0;
  double hbar = 1.0;
  double kappa = 1.0;  // exp(q2 - q1)
  double q1 = 0.0;
  double q2 = 0.0;
  UnitMode unit_mode = UnitMode::natural;

  double c() const { return unit_mode == UnitMode::natural ? 1.0 : kSpeedOfLightSI; }
  bool commutative() const { return theta == 0.0 && eta == 0.0; }
};

inline double consistency_ratio(const NCParams& p) { return std::abs(p.theta * p.eta / (4.0 * p.hbar * p.hbar)); }

inline bool consistency_warning(const NCParams& p) { return consistency_ratio(p) > kConsistencyWarnThreshold; }

/// Throws ParameterError when a record violates m > 0, hbar > 0 or
/// kappa = exp(q2 - q1).
inline void validate(const NCParams& p) {
  if (!(p.hbar > 0.0)) throw ParameterError("hbar must be positive");
  if (!(p.m > 0.0)) throw ParameterError("m must be positive");
  if (std::abs(p.kappa - std::exp(p.q2 - p.q1)) > 1e-12 * std::max(1.0, std::abs(p.kappa)))
    throw ParameterError("kappa must equal exp(q2 - q1)");
}

inline double hbar_eff(const NCParams& p) { return p.hbar * (1.0 + p.theta * p.eta / (4.0 * p.hbar * p.hbar)); }

inline double theta_of_t(const NCParams& p, double t) { return p.theta * std::exp(p.gamma * t); }
inline double eta_of_t(const NCParams& p, double t) { return p.eta * std::exp(-p.gamma * t); }

// Coefficient functions of the NC Hamiltonian in canonical variables.
inline double f_theta(const NCParams& p, double t) { return 1.0 + 0.25 * p.e * p.B * theta_of_t(p, t); }
inline double f_eta(const NCParams& p, double t) { return 0.5 * p.e * p.B + 0.5 * eta_of_t(p, t); }
inline double f_theta_rate(const NCParams& p, double t) { return 0.25 * p.e * p.B * p.gamma * theta_of_t(p, t); }
inline double f_eta_rate(const NCParams& p, double t) { return -0.5 * p.gamma * eta_of_t(p, t); }

enum class NCVar { x_nc, y_nc, px_nc, py_nc };

inline const char* ncvar_name(NCVar v) {
  switch (v) {
    case NCVar::x_nc: return "x_nc";
    case NCVar::y_nc: return "y_nc";
    case NCVar::px_nc: return "px_nc";
    default: return "py_nc";
  }
}

/// Sign conventions of the Bopp shift. Only the debug path of the CLI flips
/// momentum_sign, to exercise failure reporting.
struct BoppConvention {
  double position_sign = 1.0;
  double momentum_sign = 1.0;
};

/// Time-dependent Bopp shift:
///   x_nc = x - theta(t)/(2 hbar) py,  y_nc = y + theta(t)/(2 hbar) px,
///   px_nc = px + eta(t)/(2 hbar) y,   py_nc = py - eta(t)/(2 hbar) x.
inline PhasePoly bopp_shift(const NCParams& p, NCVar which, double t, const BoppConvention& conv = {}) {
  const double a = conv.position_sign * theta_of_t(p, t) / (2.0 * p.hbar);
  const double b = conv.momentum_sign * eta_of_t(p, t) / (2.0 * p.hbar);
  const Mat2 one = Mat2::identity();
  switch (which) {
    case NCVar::x_nc: return PhasePoly::monomial(Coord::x) + PhasePoly::monomial(Coord::py, -a * one);
    case NCVar::y_nc: return PhasePoly::monomial(Coord::y) + PhasePoly::monomial(Coord::px, a * one);
    case NCVar::px_nc: return PhasePoly::monomial(Coord::px) + PhasePoly::monomial(Coord::y, b * one);
    default: return PhasePoly::monomial(Coord::py) + PhasePoly::monomial(Coord::x, -b * one);
  }
}

struct CommutatorCheck {
  double t = 0.0;
  std::string pair;
  PhasePoly computed;
  cplx expected{};  // coefficient of the identity
  double deviation = 0.0;
  double spin_leak = 0.0;  // non-identity content of the result
};

struct DeformedAlgebraReport {
  std::vector<CommutatorCheck> checks;
  double max_deviation = 0.0;
  double hbar_eff = 0.0;

  /// First check whose deviation exceeds tol, or nullptr.
  const CommutatorCheck* first_failure(double tol) const {
    for (const auto& c : checks)
      if (c.deviation > tol) return &c;
    return nullptr;
  }
};

/// Computes the six commutators of the Bopp-shifted operators at each grid
/// time and compares them with i*theta(t)*eps, i*eta(t)*eps, i*hbar_eff, 0.
inline DeformedAlgebraReport verify_nc_algebra(const NCParams& p, const std::vector<double>& t_grid,
                                               const BoppConvention& conv = {}) {
  if (t_grid.empty()) throw GridError("verify_nc_algebra: empty time grid");
  const SymplecticForm omega(p.hbar);
  DeformedAlgebraReport rep;
  rep.hbar_eff = hbar_eff(p);
  struct Pair {
    NCVar a, b;
  };
  static constexpr std::array<Pair, 6> kPairs{{{NCVar::x_nc, NCVar::y_nc},
                                               {NCVar::px_nc, NCVar::py_nc},
                                               {NCVar::x_nc, NCVar::px_nc},
                                               {NCVar::y_nc, NCVar::py_nc},
                                               {NCVar::x_nc, NCVar::py_nc},
                                               {NCVar::y_nc, NCVar::px_nc}}};
  for (double t : t_grid) {
    const std::array<cplx, 6> expected{kI * theta_of_t(p, t), kI * eta_of_t(p, t), kI * rep.hbar_eff,
                                       kI * rep.hbar_eff,     0.0,                 0.0};
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      CommutatorCheck c;
      c.t = t;
      c.pair = std::string("[") + ncvar_name(kPairs[k].a) + "," + ncvar_name(kPairs[k].b) + "]";
      c.computed = ps_commutator(bopp_shift(p, kPairs[k].a, t, conv), bopp_shift(p, kPairs[k].b, t, conv), omega);
      c.expected = expected[k];
      c.deviation = ps_residual_norm(c.computed - PhasePoly::constant_term(Mat2::scalar(c.expected)));
      c.spin_leak = ps_spin_dependence(c.computed);
      rep.max_deviation = std::max(rep.max_deviation, c.deviation);
      rep.checks.push_back(std::move(c));
    }
  }
  return rep;
}

/// Commutative Dirac Hamiltonian in the symmetric gauge:
///   c a1 px + c a2 py + e a1 (B/2) y - e a2 (B/2) x + beta m c^2.
inline TimePhasePoly build_h_commutative(const NCParams& p) {
  using namespace pauli;
  const double c = p.c();
  PhasePoly h;
  h.lin(Coord::px) = c * alpha1();
  h.lin(Coord::py) = c * alpha2();
  h.lin(Coord::y) = (0.5 * p.e * p.B) * alpha1();
  h.lin(Coord::x) = (-0.5 * p.e * p.B) * alpha2();
  h.constant = (p.m * c * c) * beta();
  return TimePhasePoly::constant(h);
}

/// NC Hamiltonian in canonical variables (natural units):
///   a1 f_theta px - a2 f_eta x + a2 f_theta py + a1 f_eta y + beta m.
inline PhasePoly h_nc_direct(const NCParams& p, double t) {
  using namespace pauli;
  const double ft = f_theta(p, t);
  const double fe = f_eta(p, t);
  PhasePoly h;
  h.lin(Coord::px) = ft * alpha1();
  h.lin(Coord::x) = -fe * alpha2();
  h.lin(Coord::py) = ft * alpha2();
  h.lin(Coord::y) = fe * alpha1();
  h.constant = p.m * beta();
  return h;
}

inline PhasePoly h_nc_direct_rate(const NCParams& p, double t) {
  using namespace pauli;
  const double ft = f_theta_rate(p, t);
  const double fe = f_eta_rate(p, t);
  PhasePoly h;
  h.lin(Coord::px) = ft * alpha1();
  h.lin(Coord::x) = -fe * alpha2();
  h.lin(Coord::py) = ft * alpha2();
  h.lin(Coord::y) = fe * alpha1();
  return h;
}

/// Same Hamiltonian obtained by inserting the Bopp-shifted operators into the
/// commutative form (c = 1).
inline PhasePoly h_nc_from_bopp(const NCParams& p, double t, const BoppConvention& conv = {}) {
  using namespace pauli;
  const double half_eb = 0.5 * p.e * p.B;
  return alpha1() * bopp_shift(p, NCVar::px_nc, t, conv) + alpha2() * bopp_shift(p, NCVar::py_nc, t, conv) +
         (-half_eb) * (alpha2() * bopp_shift(p, NCVar::x_nc, t, conv)) +
         half_eb * (alpha1() * bopp_shift(p, NCVar::y_nc, t, conv)) + PhasePoly::constant_term(p.m * beta());
}

inline double hamiltonian_dual_path_deviation(const NCParams& p, const std::vector<double>& times,
                                              const BoppConvention& conv = {}) {
  double dev = 0.0;
  for (double t : times) dev = std::max(dev, ps_residual_norm(h_nc_from_bopp(p, t, conv) - h_nc_direct(p, t)));
  return dev;
}

inline const std::vector<double>& dual_path_check_times() {
  static const std::vector<double> kTimes{0.0, 0.5, 1.0, 2.0};
  return kTimes;
}

/// Builds H_nc(t). Requires natural units with hbar = 1, the setting in which
/// the closed form holds; both construction paths are cross-checked.
inline TimePhasePoly build_h_nc(const NCParams& p) {
  if (p.unit_mode != UnitMode::natural) throw UnitModeError("build_h_nc: the NC Hamiltonian requires natural units");
  if (p.hbar != 1.0) throw UnitModeError("build_h_nc: natural units require hbar = 1");
  const double dev = hamiltonian_dual_path_deviation(p, dual_path_check_times());
  if (dev > 1e-13) throw ConsistencyError("build_h_nc: Bopp-substituted and direct forms disagree");
  return {[p](double t) { return h_nc_direct(p, t); }, [p](double t) { return h_nc_direct_rate(p, t); }};
}

}  // namespace ncdirac
