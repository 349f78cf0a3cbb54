#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "ncdirac/ncmodel.hpp"

using namespace ncdirac;

namespace {

NCParams nc_dynamic() {
  NCParams p;
  p.theta = 0.1;
  p.eta = 0.05;
  p.gamma = 0.2;
  return p;
}

// Scalar part of the linear coefficients, as a coordinate vector.
Eigen::Vector4d coeff_vector(const PhasePoly& p) {
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) v(i) = p.linear[i](0, 0).real();
  return v;
}

// [u.z, v.z] = i u^T Omega v for I-proportional coefficients.
cplx bilinear_oracle(const PhasePoly& a, const PhasePoly& b, double hbar) {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 2) = hbar, omega(2, 0) = -hbar;
  omega(1, 3) = hbar, omega(3, 1) = -hbar;
  return kI * coeff_vector(a).dot(omega * coeff_vector(b));
}

}  // namespace

TEST(NCModel, HbarEff) {
  NCParams p;
  EXPECT_EQ(hbar_eff(p), 1.0);
  p.theta = 0.1;
  EXPECT_EQ(hbar_eff(p), 1.0);
  p.eta = 0.05;
  EXPECT_NEAR(hbar_eff(p), 1.00125, 1e-15);
}

TEST(NCModel, ConsistencyRatioSI) {
  NCParams p;
  p.unit_mode = UnitMode::si;
  p.theta = 1e-30;
  p.eta = 1.76e-61;
  p.hbar = 1.0546e-34;
  EXPECT_NEAR(consistency_ratio(p) / 3.96e-24, 1.0, 1e-2);
  EXPECT_FALSE(consistency_warning(p));
  NCParams big;
  big.theta = big.eta = 1.0;
  EXPECT_TRUE(consistency_warning(big));
}

TEST(NCModel, TimeProfiles) {
  NCParams p = nc_dynamic();
  EXPECT_NEAR(theta_of_t(p, 1.0), 0.1 * std::exp(0.2), 1e-16);
  EXPECT_NEAR(theta_of_t(p, 1.0), 0.122140, 1e-6);
  for (double t : {0.0, 0.3, 5.0}) EXPECT_NEAR(theta_of_t(p, t) * eta_of_t(p, t), p.theta * p.eta, 1e-17);
  p.gamma = 0.0;
  EXPECT_EQ(theta_of_t(p, 3.0), p.theta);
  EXPECT_EQ(eta_of_t(p, 3.0), p.eta);
}

TEST(NCModel, FFactors) {
  NCParams p;
  p.theta = 0.1;
  EXPECT_NEAR(f_theta(p, 4.0), 1.025, 1e-15);
  NCParams q = nc_dynamic();
  EXPECT_NEAR(f_eta(q, 1.0), 0.5 + 0.025 * std::exp(-0.2), 1e-15);
  EXPECT_NEAR(f_eta(q, 1.0), 0.520467, 2e-6);  // reference value is given to 6 places
  NCParams c;
  c.B = 2.0;
  EXPECT_EQ(f_theta(c, 1.0), 1.0);
  EXPECT_EQ(f_eta(c, 1.0), 1.0);
  const double h = 1e-5;
  for (double t : {0.0, 1.0}) {
    EXPECT_NEAR(f_theta_rate(q, t), (f_theta(q, t + h) - f_theta(q, t - h)) / (2 * h), 1e-9);
    EXPECT_NEAR(f_eta_rate(q, t), (f_eta(q, t + h) - f_eta(q, t - h)) / (2 * h), 1e-9);
  }
}

TEST(NCModel, BoppShiftCoefficients) {
  NCParams p;
  EXPECT_EQ(ps_residual_norm(bopp_shift(p, NCVar::x_nc, 1.0) - PhasePoly::monomial(Coord::x)), 0.0);
  p.theta = 0.1;
  const PhasePoly x = bopp_shift(p, NCVar::x_nc, 7.0);
  EXPECT_EQ(x.lin(Coord::x), Mat2::identity());
  EXPECT_NEAR(x.lin(Coord::py)(0, 0).real(), -0.05, 1e-16);
  NCParams q = nc_dynamic();
  const PhasePoly px = bopp_shift(q, NCVar::px_nc, 1.0);
  EXPECT_NEAR(px.lin(Coord::y)(0, 0).real(), 0.025 * std::exp(-0.2), 1e-16);
  EXPECT_NEAR(px.lin(Coord::y)(0, 0).real(), 0.020467, 2e-6);
}

TEST(NCModel, DeformedAlgebraMatchesOracle) {
  const std::array<NCVar, 4> vars{NCVar::x_nc, NCVar::y_nc, NCVar::px_nc, NCVar::py_nc};
  for (double hbar : {1.0, 0.5}) {
    NCParams p = nc_dynamic();
    p.hbar = hbar;
    for (double t : {0.0, 0.5, 1.0, 3.0})
      for (NCVar a : vars)
        for (NCVar b : vars) {
          const PhasePoly c = ps_commutator(bopp_shift(p, a, t), bopp_shift(p, b, t), SymplecticForm(hbar));
          EXPECT_LE(ps_residual_norm(c - PhasePoly::constant_term(Mat2::scalar(bilinear_oracle(
                                             bopp_shift(p, a, t), bopp_shift(p, b, t), hbar)))),
                    1e-15);
        }
  }
}

TEST(NCModel, VerifyAlgebraValues) {
  const NCParams p = nc_dynamic();
  const auto rep = verify_nc_algebra(p, {0.0, 1.0, 2.0});
  EXPECT_LE(rep.max_deviation, 1e-14);
  EXPECT_NEAR(rep.hbar_eff, 1.00125, 1e-15);
  for (const auto& c : rep.checks) {
    EXPECT_GE(c.deviation, 0.0);
    EXPECT_EQ(c.spin_leak, 0.0);
    if (c.pair == "[x_nc,y_nc]" && c.t == 1.0) {
      EXPECT_NEAR(c.computed.constant(0, 0).imag(), 0.122140, 1e-6);
    }
    if (c.pair == "[x_nc,px_nc]") {
      EXPECT_NEAR(c.computed.constant(0, 0).imag(), 1.00125, 1e-15);
    }
  }
  EXPECT_EQ(verify_nc_algebra(p, {0.0}).checks.size(), 6u);
  EXPECT_THROW(verify_nc_algebra(p, {}), GridError);
}

TEST(NCModel, CommutativeAlgebraIsCanonical) {
  const auto rep = verify_nc_algebra(NCParams{}, {0.0, 1.0});
  EXPECT_EQ(rep.max_deviation, 0.0);
  EXPECT_EQ(rep.hbar_eff, 1.0);
}

TEST(NCModel, FlippedBoppSignIsDetected) {
  BoppConvention flip;
  flip.momentum_sign = -1.0;
  const auto rep = verify_nc_algebra(nc_dynamic(), {0.0, 1.0}, flip);
  const auto* f = rep.first_failure(1e-12);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->pair, "[px_nc,py_nc]");
  bool hbar_eff_broken = false;
  for (const auto& c : rep.checks)
    if (c.pair == "[x_nc,px_nc]") hbar_eff_broken |= c.deviation > 1e-12;
  EXPECT_TRUE(hbar_eff_broken);
  for (const auto& c : rep.checks)
    if (c.pair == "[x_nc,y_nc]") {
      EXPECT_LE(c.deviation, 1e-15);
    }
}

TEST(NCModel, CommutativeHamiltonian) {
  NCParams p;
  p.B = 2.0;
  p.m = 3.0;
  const PhasePoly h = build_h_commutative(p)(0.0);
  EXPECT_EQ(h.lin(Coord::px), pauli::sigma1());
  EXPECT_EQ(h.lin(Coord::py), pauli::sigma2());
  EXPECT_EQ(h.lin(Coord::x), -1.0 * pauli::sigma2());
  EXPECT_EQ(h.lin(Coord::y), pauli::sigma1());
  EXPECT_EQ(h.constant, 3.0 * pauli::sigma3());
  p.B = 0.0;
  const PhasePoly free = build_h_commutative(p)(0.0);
  EXPECT_EQ(free.lin(Coord::x), Mat2{});
  EXPECT_EQ(free.lin(Coord::y), Mat2{});
  EXPECT_LE(ps_hermitian_check(h), 0.0);
}

TEST(NCModel, NCHamiltonianSlots) {
  const NCParams p = nc_dynamic();
  const PhasePoly h = build_h_nc(p)(0.0);
  EXPECT_LE(max_abs_diff(h.lin(Coord::px), 1.025 * pauli::sigma1()), 1e-15);
  EXPECT_LE(max_abs_diff(h.lin(Coord::x), -0.525 * pauli::sigma2()), 1e-15);
  EXPECT_LE(max_abs_diff(h.lin(Coord::py), 1.025 * pauli::sigma2()), 1e-15);
  EXPECT_LE(max_abs_diff(h.lin(Coord::y), 0.525 * pauli::sigma1()), 1e-15);
  EXPECT_EQ(h.constant, pauli::sigma3());
  EXPECT_EQ(ps_hermitian_check(h), 0.0);
}

TEST(NCModel, NCReducesToCommutative) {
  NCParams p;
  p.B = 1.7;
  p.m = 0.4;
  EXPECT_EQ(ps_residual_norm(build_h_nc(p)(0.8) - build_h_commutative(p)(0.8)), 0.0);
}

TEST(NCModel, DualPathAgreement) {
  const NCParams p = nc_dynamic();
  EXPECT_LE(hamiltonian_dual_path_deviation(p, dual_path_check_times()), 1e-13);
  BoppConvention flip;
  flip.momentum_sign = -1.0;
  EXPECT_GT(hamiltonian_dual_path_deviation(p, dual_path_check_times(), flip), 1e-3);
}

TEST(NCModel, HamiltonianRateMatchesFiniteDifference) {
  const NCParams p = nc_dynamic();
  const auto h = build_h_nc(p);
  const double d = 1e-5;
  for (double t : {0.0, 0.5, 2.0}) {
    const PhasePoly fd = (1.0 / (2 * d)) * (h(t + d) - h(t - d));
    EXPECT_LE(ps_residual_norm(fd - h.rate(t)), 1e-8);
  }
}

TEST(NCModel, RejectsUnsupportedUnits) {
  NCParams p;
  p.unit_mode = UnitMode::si;
  EXPECT_THROW(build_h_nc(p), UnitModeError);
  NCParams q;
  q.hbar = 2.0;
  EXPECT_THROW(build_h_nc(q), UnitModeError);
}

TEST(NCModel, Validation) {
  NCParams p;
  EXPECT_NO_THROW(validate(p));
  p.m = 0.0;
  EXPECT_THROW(validate(p), ParameterError);
  NCParams q;
  q.hbar = -1.0;
  EXPECT_THROW(validate(q), ParameterError);
  NCParams k;
  k.q2 = 1.0;
  EXPECT_THROW(validate(k), ParameterError);
  k.kappa = std::exp(1.0);
  EXPECT_NO_THROW(validate(k));
}
