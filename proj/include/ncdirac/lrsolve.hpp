#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/ncmodel.hpp"

namespace ncdirac {

inline void require_natural(const NCParams& p, const char* what) {
  if (p.unit_mode != UnitMode::natural) throw UnitModeError(std::string(what) + ": requires natural units");
}

/// Spinor envelope F1 = exp(-i m t + q1), F2 = exp(i m t + q2).
struct SpinorEnvelope {
  double m = 1.0;
  double q1 = 0.0;
  double q2 = 0.0;

  cplx F1(double t) const { return std::exp(cplx{q1, -m * t}); }
  cplx F2(double t) const { return std::exp(cplx{q2, m * t}); }
};

inline SpinorEnvelope make_envelope(const NCParams& p) { return {p.m, p.q1, p.q2}; }

inline std::pair<cplx, cplx> f_closed(const NCParams& p, double t) {
  require_natural(p, "f_closed");
  const auto env = make_envelope(p);
  return {env.F1(t), env.F2(t)};
}

/// Inverse squared magnetic length, 1 / l_B^2 = e B.
inline double inv_magnetic_length_sq(const NCParams& p) { return p.e * p.B; }

/// The term eta kappa / (4 i m - 2 gamma) exp((-gamma + 2 i m) t) of xi_1,
/// before the overall factor -i.
inline cplx xi_nc_branch(const NCParams& p, double t) {
  const cplx denom{-2.0 * p.gamma, 4.0 * p.m};
  return p.eta * p.kappa / denom * std::exp(cplx{-p.gamma * t, 2.0 * p.m * t});
}

/// Closed-form (xi_1, xi_2) with xi_2 = xi_1 / i:
///   xi_1 = -i [ kappa / (4 l_B^2 i m) e^{2imt} + eta kappa / (4im - 2 gamma) e^{(-gamma + 2im) t} ].
inline std::pair<cplx, cplx> xi_closed(const NCParams& p, double t) {
  require_natural(p, "xi_closed");
  if (p.m == 0.0) throw SingularParameterError("xi_closed: the closed form divides by m (kappa / (4 l_B^2 i m)), m = 0");
  const cplx landau = p.kappa * inv_magnetic_length_sq(p) / cplx{0.0, 4.0 * p.m} * std::exp(cplx{0.0, 2.0 * p.m * t});
  const cplx xi1 = -kI * (landau + xi_nc_branch(p, t));
  return {xi1, xi1 / kI};
}

/// State of the envelope/phase ODE system.
struct XiState {
  cplx xi1{}, xi2{}, xi3{}, xi4{}, F1{}, F2{};

  XiState& operator+=(const XiState& o) {
    xi1 += o.xi1, xi2 += o.xi2, xi3 += o.xi3, xi4 += o.xi4, F1 += o.F1, F2 += o.F2;
    return *this;
  }
  friend XiState operator+(XiState a, const XiState& b) { return a += b; }
  friend XiState operator*(double s, XiState a) {
    a.xi1 *= s, a.xi2 *= s, a.xi3 *= s, a.xi4 *= s, a.F1 *= s, a.F2 *= s;
    return a;
  }
};

///   dF1/dt = -i m F1,           dF2/dt = i m F2,
///   dxi1/dt = -i f_eta F2/F1,   dxi2/dt = -f_eta F2/F1,
///   dxi3/dt = dxi4/dt = 0.
inline XiState xi_ode_rhs(const NCParams& p, double t, const XiState& s) {
  require_natural(p, "xi_ode_rhs");
  if (s.F1 == cplx{}) throw DivisionError("xi_ode_rhs: F1 = 0");
  const cplx ratio = s.F2 / s.F1;
  const double fe = f_eta(p, t);
  XiState d;
  d.F1 = cplx{0.0, -p.m} * s.F1;
  d.F2 = cplx{0.0, p.m} * s.F2;
  d.xi1 = -kI * fe * ratio;
  d.xi2 = -fe * ratio;
  return d;
}

/// Right-hand side with F1, F2 taken from the closed-form envelope.
inline XiState xi_ode_rhs(const NCParams& p, double t) {
  XiState s;
  std::tie(s.F1, s.F2) = f_closed(p, t);
  return xi_ode_rhs(p, t, s);
}

struct XiSample {
  double t = 0.0;
  XiState rk4;
  XiState closed;
  cplx nc_branch{};
  double dev_xi1 = 0.0, dev_xi2 = 0.0, dev_F1 = 0.0, dev_F2 = 0.0;
};

struct XiTrajectory {
  std::vector<XiSample> samples;
  double max_dev_xi1 = 0.0, max_dev_xi2 = 0.0, max_dev_F1 = 0.0, max_dev_F2 = 0.0;

  double max_deviation() const { return std::max({max_dev_xi1, max_dev_xi2, max_dev_F1, max_dev_F2}); }
};

inline XiState closed_state(const NCParams& p, double t, cplx xi3, cplx xi4) {
  XiState s;
  std::tie(s.xi1, s.xi2) = xi_closed(p, t);
  std::tie(s.F1, s.F2) = f_closed(p, t);
  s.xi3 = xi3;
  s.xi4 = xi4;
  return s;
}

/// Classical RK4 from the closed-form state at t0, recording the closed-form
/// values next to every step. The last step is shortened to land on t1.
inline XiTrajectory integrate_rk4(const NCParams& p, double t0, double t1, double dt, cplx xi3 = {}, cplx xi4 = {}) {
  if (!(t1 > t0)) throw StepError("integrate_rk4: need t1 > t0");
  if (!(dt > 0.0)) throw StepError("integrate_rk4: need dt > 0");
  if (dt > t1 - t0) throw StepError("integrate_rk4: dt exceeds the integration interval");

  const double span = t1 - t0;
  auto steps = static_cast<long>(std::floor(span / dt + 1e-9));
  const bool partial = span - steps * dt > 1e-12 * span;

  XiTrajectory traj;
  auto record = [&](double t, const XiState& y) {
    XiSample s;
    s.t = t;
    s.rk4 = y;
    s.closed = closed_state(p, t, xi3, xi4);
    s.nc_branch = xi_nc_branch(p, t);
    s.dev_xi1 = std::abs(y.xi1 - s.closed.xi1);
    s.dev_xi2 = std::abs(y.xi2 - s.closed.xi2);
    s.dev_F1 = std::abs(y.F1 - s.closed.F1);
    s.dev_F2 = std::abs(y.F2 - s.closed.F2);
    traj.max_dev_xi1 = std::max(traj.max_dev_xi1, s.dev_xi1);
    traj.max_dev_xi2 = std::max(traj.max_dev_xi2, s.dev_xi2);
    traj.max_dev_F1 = std::max(traj.max_dev_F1, s.dev_F1);
    traj.max_dev_F2 = std::max(traj.max_dev_F2, s.dev_F2);
    traj.samples.push_back(s);
  };
  auto step = [&](double t, const XiState& y, double h) {
    const XiState k1 = xi_ode_rhs(p, t, y);
    const XiState k2 = xi_ode_rhs(p, t + 0.5 * h, y + (0.5 * h) * k1);
    const XiState k3 = xi_ode_rhs(p, t + 0.5 * h, y + (0.5 * h) * k2);
    const XiState k4 = xi_ode_rhs(p, t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  XiState y = closed_state(p, t0, xi3, xi4);
  traj.samples.reserve(static_cast<std::size_t>(steps) + 2);
  record(t0, y);
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    y = step(t, y, dt);
    record(t0 + (k + 1) * dt, y);
  }
  if (partial) {
    const double t = t0 + steps * dt;
    y = step(t, y, t1 - t);
    record(t1, y);
  }
  return traj;
}

/// xi_1 .. xi_4 as functions of time; xi_3 and xi_4 are constants.
struct XiFunctions {
  NCParams params;
  cplx xi3{};
  cplx xi4{};

  cplx xi1(double t) const { return xi_closed(params, t).first; }
  cplx xi2(double t) const { return xi_closed(params, t).second; }
  double magnetic_length() const { return 1.0 / std::sqrt(inv_magnetic_length_sq(params)); }
};

/// theta(x, y, t) = sum over the four exponent functions of (xi_k(0) - xi_k(t))
/// times x, y, x^2, y^2.
inline cplx theta_phase(const XiFunctions& xi, double x, double y, double t) {
  // xi3 and xi4 are time-independent, so their differences vanish.
  return (xi.xi1(0.0) - xi.xi1(t)) * x + (xi.xi2(0.0) - xi.xi2(t)) * y;
}

/// Sampled energy E(t) on an increasing grid.
struct EnergySeries {
  std::vector<double> t;
  std::vector<double> E;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;  // h^2 (b - a) max|E''| / 12 from second differences
};

/// Composite trapezoid of E over [ta, tb]; the partial interval at either end
/// uses linear interpolation.
inline QuadratureResult energy_integral(const EnergySeries& s, double ta, double tb) {
  if (s.t.size() != s.E.size() || s.t.size() < 2) throw CoverageError("energy series needs at least two samples");
  const double slack = 1e-12 * std::max(1.0, std::abs(s.t.back()));
  if (ta < s.t.front() - slack || tb > s.t.back() + slack || tb < ta)
    throw CoverageError("energy series does not cover the requested interval");
  auto interp = [&](std::size_t k, double t) {
    const double w = (t - s.t[k]) / (s.t[k + 1] - s.t[k]);
    return s.E[k] + w * (s.E[k + 1] - s.E[k]);
  };
  QuadratureResult r;
  double hmax = 0.0;
  for (std::size_t k = 0; k + 1 < s.t.size(); ++k) {
    const double lo = std::max(ta, s.t[k]);
    const double hi = std::min(tb, s.t[k + 1]);
    if (hi <= lo) continue;
    r.value += 0.5 * (hi - lo) * (interp(k, lo) + interp(k, hi));
    hmax = std::max(hmax, s.t[k + 1] - s.t[k]);
  }
  double d2 = 0.0;
  for (std::size_t k = 1; k + 1 < s.t.size(); ++k) {
    const double h1 = s.t[k] - s.t[k - 1], h2 = s.t[k + 1] - s.t[k];
    const double second = 2.0 * ((s.E[k + 1] - s.E[k]) / h2 - (s.E[k] - s.E[k - 1]) / h1) / (h1 + h2);
    d2 = std::max(d2, std::abs(second));
  }
  r.error_bound = hmax * hmax * (tb - ta) * d2 / 12.0;
  return r;
}

enum class EnergySource { user_supplied, fock_tracked };

/// alpha(t) = theta - integral_0^t E dt'.
struct LRPhase {
  cplx theta_part{};
  QuadratureResult energy_integral;
  EnergySource source = EnergySource::user_supplied;

  cplx alpha() const { return theta_part - energy_integral.value; }
};

inline LRPhase lr_phase(cplx theta_part, const EnergySeries& series, double t,
                        EnergySource source = EnergySource::user_supplied) {
  LRPhase ph;
  ph.theta_part = theta_part;
  ph.energy_integral = energy_integral(series, 0.0, t);
  ph.source = source;
  return ph;
}

using Spinor = std::array<cplx, 2>;

/// psi(x, y, t) = (F1, F2)^T exp[i (xi1 x + xi2 y + xi3 x^2 + xi4 y^2)].
class SpinorField {
 public:
  SpinorField(SpinorEnvelope env, XiFunctions xi) : env_(env), xi_(std::move(xi)) {}

  cplx exponent(double x, double y, double t) const {
    return kI * (xi_.xi1(t) * x + xi_.xi2(t) * y + xi_.xi3 * x * x + xi_.xi4 * y * y);
  }

  Spinor operator()(double x, double y, double t) const {
    const cplx ph = std::exp(exponent(x, y, t));
    return {env_.F1(t) * ph, env_.F2(t) * ph};
  }

  const SpinorEnvelope& envelope() const { return env_; }
  const XiFunctions& xi() const { return xi_; }

 private:
  SpinorEnvelope env_;
  XiFunctions xi_;
};

inline SpinorField assemble_solution(const SpinorEnvelope& env, const XiFunctions& xi) { return {env, xi}; }

/// Linear combination sum_k C_k psi_k of trial solutions.
class Superposition {
 public:
  void add(cplx coefficient, SpinorField field) { terms_.emplace_back(coefficient, std::move(field)); }

  Spinor operator()(double x, double y, double t) const {
    Spinor out{};
    for (const auto& [c, f] : terms_) {
      const Spinor v = f(x, y, t);
      out[0] += c * v[0];
      out[1] += c * v[1];
    }
    return out;
  }

 private:
  std::vector<std::pair<cplx, SpinorField>> terms_;
};

/// Max over the spatial grid of |i d(psi)/dt - H_nc psi| / |psi| for the trial
/// solution, with px = -i d/dx acting analytically on the exponent. This is a
/// diagnostic; no target value is asserted.
inline double trial_residual(const NCParams& p, const SpinorField& field, const std::vector<double>& xs,
                             const std::vector<double>& ys, double t) {
  const auto& xi = field.xi();
  const auto& env = field.envelope();
  const XiState rates = xi_ode_rhs(p, t, XiState{xi.xi1(t), xi.xi2(t), xi.xi3, xi.xi4, env.F1(t), env.F2(t)});
  const double ft = f_theta(p, t), fe = f_eta(p, t);
  double worst = 0.0;
  for (double x : xs) {
    for (double y : ys) {
      const Spinor psi = field(x, y, t);
      // i d/dt of F_k exp(iS): i F_k' e^{iS} - F_k S_t e^{iS}
      const cplx st = rates.xi1 * x + rates.xi2 * y;
      const cplx e = std::exp(field.exponent(x, y, t));
      const Spinor lhs{kI * rates.F1 * e - st * psi[0], kI * rates.F2 * e - st * psi[1]};
      const cplx px = xi.xi1(t) + 2.0 * xi.xi3 * x;  // eigenvalue of -i d/dx on e^{iS}
      const cplx py = xi.xi2(t) + 2.0 * xi.xi4 * y;
      // Off-diagonal entries of a1 (ft px + fe y) + a2 (ft py - fe x).
      const cplx u = ft * px + fe * y;
      const cplx v = ft * py - fe * x;
      const Spinor rhs{p.m * psi[0] + (u - kI * v) * psi[1], (u + kI * v) * psi[0] - p.m * psi[1]};
      const double norm = std::sqrt(std::norm(psi[0]) + std::norm(psi[1]));
      const double diff = std::sqrt(std::norm(lhs[0] - rhs[0]) + std::norm(lhs[1] - rhs[1]));
      worst = std::max(worst, diff / norm);
    }
  }
  return worst;
}

}  // namespace ncdirac
