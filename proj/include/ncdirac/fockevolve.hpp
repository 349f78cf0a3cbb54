#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/invariant.hpp"
#include "ncdirac/ncmodel.hpp"
#include "ncdirac/phasepoly.hpp"

namespace ncdirac {

using SparseMat = Eigen::SparseMatrix<cplx>;
using DenseMat = Eigen::MatrixXcd;
using StateVec = Eigen::VectorXcd;

/// Two oscillator modes truncated to n < N each, tensored with spin.
/// Basis index of |n_x, n_y, s> is (n_x N + n_y) 2 + s.
class FockRep {
 public:
  FockRep(int N, double ell, double hbar) : N_(N), ell_(ell), hbar_(hbar) {
    if (N < 2) throw SizeError("FockRep: truncation N must be at least 2");
    if (!(ell > 0.0)) throw ParameterError("FockRep: ell must be positive");
    if (!(hbar > 0.0)) throw ParameterError("FockRep: hbar must be positive");

    // Single-mode ladder operator a|n> = sqrt(n)|n-1>.
    DenseMat a = DenseMat::Zero(N, N);
    for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const DenseMat ad = a.adjoint();
    const double r2 = std::sqrt(2.0);
    const DenseMat x1 = (ell / r2) * (a + ad);
    const DenseMat p1 = (kI * hbar / (r2 * ell)) * (ad - a);
    const DenseMat id = DenseMat::Identity(N, N);

    mode_[idx(Coord::x)] = kron_sparse(x1, id);
    mode_[idx(Coord::y)] = kron_sparse(id, x1);
    mode_[idx(Coord::px)] = kron_sparse(p1, id);
    mode_[idx(Coord::py)] = kron_sparse(id, p1);
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        SparseMat s = (mode_[i] * mode_[j] + mode_[j] * mode_[i]) * cplx{0.5};
        s.prune(cplx{0.0});
        quad_[PhasePoly::quad_index(i, j)] = s;
      }
    }
  }

  int N() const { return N_; }
  double ell() const { return ell_; }
  double hbar() const { return hbar_; }
  Eigen::Index mode_dim() const { return static_cast<Eigen::Index>(N_) * N_; }
  Eigen::Index dim() const { return 2 * mode_dim(); }

  Eigen::Index index(int nx, int ny, int spin) const { return (static_cast<Eigen::Index>(nx) * N_ + ny) * 2 + spin; }

  /// Mode operator without the spinor factor.
  const SparseMat& mode_operator(Coord c) const { return mode_[idx(c)]; }

  /// Coordinate operator on the full space (mode operator x spinor identity).
  SparseMat coord(Coord c) const { return represent(PhasePoly::monomial(c)); }

  /// Matrix of a phase-space polynomial. Weyl-ordered quadratics map to
  /// symmetrized matrix products.
  SparseMat represent(const PhasePoly& p) const {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(dim()) * 12);
    auto add_term = [&](const SparseMat* mode, const Mat2& c) {
      if (c == Mat2{}) return;
      if (mode == nullptr) {
        for (Eigen::Index r = 0; r < mode_dim(); ++r)
          for (int s = 0; s < 2; ++s)
            for (int u = 0; u < 2; ++u)
              if (c(s, u) != cplx{}) trip.emplace_back(2 * r + s, 2 * r + u, c(s, u));
        return;
      }
      for (Eigen::Index k = 0; k < mode->outerSize(); ++k)
        for (SparseMat::InnerIterator it(*mode, k); it; ++it)
          for (int s = 0; s < 2; ++s)
            for (int u = 0; u < 2; ++u)
              if (c(s, u) != cplx{}) trip.emplace_back(2 * it.row() + s, 2 * it.col() + u, it.value() * c(s, u));
    };
    add_term(nullptr, p.constant);
    for (int i = 0; i < 4; ++i) add_term(&mode_[i], p.linear[i]);
    for (int k = 0; k < PhasePoly::kQuadSlots; ++k) add_term(&quad_[k], p.quadratic[k]);
    SparseMat out(dim(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
  }

  /// Product coherent state of the two modes (amplitudes alpha_x, alpha_y)
  /// with the given spinor, renormalized after truncation.
  StateVec coherent_state(cplx alpha_x = {}, cplx alpha_y = {}, std::array<cplx, 2> spin = {1.0, 0.0}) const {
    auto amplitudes = [this](cplx alpha) {
      std::vector<cplx> c(static_cast<std::size_t>(N_));
      c[0] = 1.0;
      for (int n = 1; n < N_; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
      return c;
    };
    const auto cx = amplitudes(alpha_x);
    const auto cy = amplitudes(alpha_y);
    StateVec v(dim());
    for (int nx = 0; nx < N_; ++nx)
      for (int ny = 0; ny < N_; ++ny)
        for (int s = 0; s < 2; ++s) v(index(nx, ny, s)) = cx[nx] * cy[ny] * spin[s];
    return v / v.norm();
  }

 private:
  static SparseMat kron_sparse(const DenseMat& a, const DenseMat& b) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (a(i, j) == cplx{}) continue;
        for (Eigen::Index k = 0; k < b.rows(); ++k)
          for (Eigen::Index l = 0; l < b.cols(); ++l)
            if (b(k, l) != cplx{}) trip.emplace_back(i * b.rows() + k, j * b.cols() + l, a(i, j) * b(k, l));
      }
    SparseMat out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
  }

  int N_;
  double ell_;
  double hbar_;
  std::array<SparseMat, 4> mode_;
  std::array<SparseMat, PhasePoly::kQuadSlots> quad_;
};

inline FockRep build_fock_rep(int N, double ell, double hbar) { return FockRep(N, ell, hbar); }

/// Magnetic length (|e B|)^{-1/2}; 1 when the field vanishes.
inline double default_oscillator_length(const NCParams& p) {
  const double eb = std::abs(p.e * p.B);
  return eb > 0.0 ? 1.0 / std::sqrt(eb) : 1.0;
}

template <typename Matrix>
cplx expectation(const Matrix& m, const StateVec& psi) {
  if (m.rows() != psi.size() || m.cols() != psi.size()) throw DimError("expectation: dimension mismatch");
  return psi.dot(m * psi);
}

/// Induced 1-norm (max column sum) of a sparse matrix.
inline double one_norm(const SparseMat& m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMat::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

/// exp(-i H tau) psi by a Taylor series summed to machine precision, with
/// substeps keeping ||H tau|| <= 1/2.
inline StateVec apply_propagator(const SparseMat& h, double tau, StateVec psi) {
  const double scale = one_norm(h) * std::abs(tau);
  const int substeps = std::max(1, static_cast<int>(std::ceil(scale / 0.5)));
  const double h_sub = tau / substeps;
  const cplx factor = cplx{0.0, -h_sub};
  for (int s = 0; s < substeps; ++s) {
    StateVec term = psi;
    StateVec sum = psi;
    const double ref = psi.norm();
    for (int k = 1; k < 60; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      sum += term;
      if (term.norm() <= std::numeric_limits<double>::epsilon() * 1e-2 * ref) break;
    }
    psi = std::move(sum);
  }
  return psi;
}

struct EvolveOptions {
  // Track the instantaneous eigenvalue every `track_every` steps (0 = off).
  int track_every = 0;
};

struct EvolvedState {
  std::vector<double> t;
  std::vector<StateVec> states;
  std::vector<double> E_tracked;  // NaN where not tracked
  double max_norm_drift = 0.0;
  double max_step_norm_change = 0.0;
};

// Relative spacing tolerance; absorbs rounding in t0 + k dt.
inline constexpr double kUniformGridTol = 1e-6;

inline void require_uniform(const std::vector<double>& grid) {
  if (grid.size() < 2) throw GridError("evolve: time grid needs at least two points");
  const double dt = grid[1] - grid[0];
  if (!(dt > 0.0)) throw GridError("evolve: time grid must be increasing");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (std::abs((grid[k] - grid[k - 1]) - dt) > kUniformGridTol * dt)
      throw GridError("evolve: time grid must be uniform");
}

namespace detail {

// Eigen-decomposition of a Hermitian sparse operator via a dense solver.
inline Eigen::SelfAdjointEigenSolver<DenseMat> hermitian_eigen(const SparseMat& m) {
  return Eigen::SelfAdjointEigenSolver<DenseMat>(DenseMat(m));
}

}  // namespace detail

/// Midpoint-sampled propagation psi_{k+1} = exp(-i H(t_{k+1/2}) dt) psi_k.
inline EvolvedState evolve(const TimePhasePoly& h, const FockRep& rep, const StateVec& psi0,
                           const std::vector<double>& t_grid, const EvolveOptions& opts = {}) {
  require_uniform(t_grid);
  if (psi0.size() != rep.dim()) throw DimError("evolve: initial state has the wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw ParameterError("evolve: initial state must have unit norm");

  EvolvedState out;
  out.t = t_grid;
  out.states.reserve(t_grid.size());
  out.E_tracked.assign(t_grid.size(), std::numeric_limits<double>::quiet_NaN());

  std::optional<double> tracked;
  auto track = [&](std::size_t k, const StateVec& psi) {
    const auto es = detail::hermitian_eigen(rep.represent(h(t_grid[k])));
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::Index best = 0;
    if (!tracked) {
      // Start on the eigenvector with the largest overlap with psi0.
      double overlap = -1.0;
      for (Eigen::Index j = 0; j < ev.size(); ++j) {
        const double o = std::norm(es.eigenvectors().col(j).dot(psi));
        if (o > overlap) overlap = o, best = j;
      }
    } else {
      for (Eigen::Index j = 0; j < ev.size(); ++j)
        if (std::abs(ev(j) - *tracked) < std::abs(ev(best) - *tracked)) best = j;
    }
    tracked = ev(best);
    out.E_tracked[k] = *tracked;
  };

  StateVec psi = psi0;
  out.states.push_back(psi);
  if (opts.track_every > 0) track(0, psi);
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double dt = t_grid[k + 1] - t_grid[k];
    const double tmid = 0.5 * (t_grid[k] + t_grid[k + 1]);
    const double before = psi.norm();
    psi = apply_propagator(rep.represent(h(tmid)), dt, std::move(psi));
    const double after = psi.norm();
    out.max_step_norm_change = std::max(out.max_step_norm_change, std::abs(after - before));
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(after - 1.0));
    out.states.push_back(psi);
    if (opts.track_every > 0 && ((k + 1) % static_cast<std::size_t>(opts.track_every) == 0 || k + 2 == t_grid.size()))
      track(k + 1, psi);
  }
  return out;
}

struct DriftSeries {
  std::vector<double> t;
  std::vector<cplx> expectation;
  std::vector<double> drift;  // Re<I>(t) - Re<I>(0)
  double summary = 0.0;       // max |drift| / (|<I>(0)| + 1)
  std::vector<double> eigen_overlap;  // |P_lambda psi(t)|^2 when psi0 is an eigenvector of I
};

/// Drift of <I> along an evolved trajectory.
inline DriftSeries invariant_drift(const TimePhasePoly& inv, const FockRep& rep, const EvolvedState& states) {
  DriftSeries d;
  d.t = states.t;
  for (std::size_t k = 0; k < states.t.size(); ++k) {
    // the propagator is unitary only up to truncation of its series
    const StateVec& psi = states.states[k];
    d.expectation.push_back(expectation(rep.represent(inv(states.t[k])), psi) / psi.squaredNorm());
  }
  const double ref = d.expectation.front().real();
  double worst = 0.0;
  for (const auto& e : d.expectation) {
    d.drift.push_back(e.real() - ref);
    worst = std::max(worst, std::abs(e.real() - ref));
  }
  d.summary = worst / (std::abs(d.expectation.front()) + 1.0);
  return d;
}

inline DriftSeries invariant_drift(const PhasePoly& inv, const FockRep& rep, const EvolvedState& states) {
  return invariant_drift(TimePhasePoly::constant(inv), rep, states);
}

/// Weight of psi(t) in the eigenspace of the (constant) invariant matrix that
/// contains psi(0). Returns an empty series when psi(0) is not an eigenvector
/// within `tol`.
inline std::vector<double> eigenprojection_overlap(const SparseMat& inv, const EvolvedState& states,
                                                   double tol = 1e-8) {
  const StateVec& psi0 = states.states.front();
  const cplx lambda = expectation(inv, psi0);
  if ((inv * psi0 - lambda * psi0).norm() > tol) return {};
  const auto es = detail::hermitian_eigen(inv);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (std::abs(es.eigenvalues()(j) - lambda.real()) <= std::max(tol, 1e-9 * std::abs(lambda))) cols.push_back(j);
  std::vector<double> out;
  for (const auto& psi : states.states) {
    double w = 0.0;
    for (auto j : cols) w += std::norm(es.eigenvectors().col(j).dot(psi));
    out.push_back(w);
  }
  return out;
}

/// Predicted drift from d<I>/dt = -i <[I,H] + i dI/dt>, integrated with the
/// trapezoid rule along the trajectory.
inline std::vector<double> ehrenfest_drift(const TimePhasePoly& inv, const TimePhasePoly& h, const FockRep& rep,
                                           const EvolvedState& states) {
  const SymplecticForm omega(rep.hbar());
  std::vector<double> rate;
  for (std::size_t k = 0; k < states.t.size(); ++k) {
    const PhasePoly r = invariance_residual(inv, h, omega, states.t[k]);
    rate.push_back((-kI * expectation(rep.represent(r), states.states[k])).real());
  }
  std::vector<double> out(states.t.size(), 0.0);
  for (std::size_t k = 1; k < states.t.size(); ++k)
    out[k] = out[k - 1] + 0.5 * (states.t[k] - states.t[k - 1]) * (rate[k] + rate[k - 1]);
  return out;
}

/// Eigenvalues of represent(I(t)) at each time, ascending.
inline std::vector<Eigen::VectorXd> spectrum_series(const TimePhasePoly& inv, const FockRep& rep,
                                                    const std::vector<double>& times) {
  std::vector<Eigen::VectorXd> out;
  for (double t : times) out.push_back(Eigen::SelfAdjointEigenSolver<DenseMat>(DenseMat(rep.represent(inv(t))), Eigen::EigenvaluesOnly).eigenvalues());
  return out;
}

struct UncertaintyResult {
  double lhs = 0.0;     // Delta A * Delta B
  double rhs = 0.0;     // |<[A,B]>| / 2
  double margin = 0.0;  // lhs - rhs
};

inline constexpr double kUncertaintyMarginTol = 1e-9;

/// Robertson product for two Hermitian polynomials. The commutator is taken
/// from the exact operator algebra and then represented.
inline UncertaintyResult uncertainty_check(const StateVec& psi, const PhasePoly& a, const PhasePoly& b,
                                           const FockRep& rep) {
  const SparseMat ma = rep.represent(a);
  const SparseMat mb = rep.represent(b);
  const StateVec apsi = ma * psi;
  const StateVec bpsi = mb * psi;
  const double ea = psi.dot(apsi).real();
  const double eb = psi.dot(bpsi).real();
  const double var_a = std::max(0.0, apsi.squaredNorm() - ea * ea);
  const double var_b = std::max(0.0, bpsi.squaredNorm() - eb * eb);
  const PhasePoly comm = ps_commutator(a, b, SymplecticForm(rep.hbar()));
  UncertaintyResult r;
  r.lhs = std::sqrt(var_a * var_b);
  r.rhs = 0.5 * std::abs(expectation(rep.represent(comm), psi));
  r.margin = r.lhs - r.rhs;
  return r;
}

}  // namespace ncdirac
