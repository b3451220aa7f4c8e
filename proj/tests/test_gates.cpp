#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kcq/errors.hpp"
#include "kcq/gates.hpp"

using namespace kcq;

namespace {

constexpr double kPi = std::numbers::pi;

// <n> = 5.2 at delta = 2K.
KerrCatParams detuned() { return {2.0, 4.2, 1.0, 0}; }

// Fixed-step RK4 on i dpsi/dt = H(t) psi, written independently of the
// adaptive integrator.
FockState rk4(const HamiltonianFn& h, FockState psi, double T, int steps) {
  const double dt = T / steps;
  const cplx mi(0.0, -1.0);
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const FockState k1 = mi * (h(t) * psi);
    const FockState k2 = mi * (h(t + dt / 2) * (psi + dt / 2 * k1));
    const FockState k3 = mi * (h(t + dt / 2) * (psi + dt / 2 * k2));
    const FockState k4 = mi * (h(t + dt) * (psi + dt * k3));
    psi += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

}  // namespace

TEST(ModulationPhase, EndpointsVanish) {
  const XGatePulse pulse{10.0, 6.0};
  EXPECT_EQ(modulation_phase(0.0, pulse), 0.0);
  EXPECT_EQ(modulation_phase(6.0, pulse), 0.0);
}

TEST(ModulationPhase, BranchesAgreeAtOneThird) {
  const XGatePulse pulse{7.5, 9.0};
  const double third = pulse.t_gate / 3.0;
  EXPECT_NEAR(modulation_phase(third, pulse), -pulse.delta0 * third, 1e-12);
  const double after = std::nextafter(third, 1e9);
  EXPECT_LT(std::abs(modulation_phase(after, pulse) - modulation_phase(third, pulse)),
            1e-12 * pulse.delta0 * pulse.t_gate);
}

TEST(ModulationPhase, MatchesPiecewiseFormula) {
  const XGatePulse pulse{3.0, 4.0};
  const double T = pulse.t_gate;
  auto f = [T](double s) { return std::exp(-8.0 * (s - T / 3) * (s - T / 3) / (T * T)); };
  for (int i = 0; i <= 40; ++i) {
    const double t = T * i / 40.0;
    const double ref = t <= T / 3 ? -3.0 * t * std::sin(1.5 * kPi * t / T)
                                  : -3.0 * t * f(t) * (f(t) - f(T)) / (1 - f(T));
    EXPECT_NEAR(modulation_phase(t, pulse), ref, 1e-13);
  }
}

TEST(ModulationPhase, RejectsOutOfRange) {
  const XGatePulse pulse{1.0, 2.0};
  EXPECT_THROW(modulation_phase(-1e-9, pulse), InvalidArgument);
  EXPECT_THROW(modulation_phase(2.0 + 1e-9, pulse), InvalidArgument);
  EXPECT_THROW(modulation_phase(0.0, XGatePulse{1.0, 0.0}), InvalidArgument);
}

TEST(XGate, UnmodulatedDriveKeepsWells) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  const GateRun r = x_gate_sim(p, nullptr, {0.0, 8.0}, f.basis.col(0));
  EXPECT_NEAR(r.z_initial, 1.0, 1e-10);
  EXPECT_LT(std::abs(r.z_final - r.z_initial), 0.02);
  EXPECT_NEAR(r.state.norm(), 1.0, 1e-6);
}

TEST(XGate, MatchesFixedStepOracle) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  const XGatePulse pulse{10.0, 6.0};
  const GateRun r = x_gate_sim(p, nullptr, pulse, f.basis.col(0));
  const FockState ref = rk4(x_gate_hamiltonian(p, pulse), f.basis.col(0), pulse.t_gate, 12000);
  EXPECT_LT((r.state - ref).norm(), 1e-6);
  EXPECT_NEAR(r.state.norm(), 1.0, 1e-6);
}

TEST(XGate, LindbladWithoutNoiseMatchesClosedSystem) {
  const KerrCatParams p = detuned();
  const XGatePulse pulse{10.0, 6.0};
  const NoiseParams none{};
  const LogicalChannel closed = x_gate_channel(p, pulse);
  const LogicalChannel open = x_gate_channel(p, pulse, &none);
  EXPECT_LT(ptm_distance(closed.ptm, open.ptm), 1e-6);
  EXPECT_NEAR(closed.leakage, open.leakage, 1e-6);
}

TEST(XGate, NoisyChannelIsTracePreservingOverall) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  NoiseParams np;
  np.kappa1 = 0.02;
  np.n_th = 0.04;
  const GateRun r = x_gate_sim(p, &np, {10.0, 6.0}, f.basis.col(0));
  EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-7);
  EXPECT_GE(r.leakage, 0.0);
  EXPECT_LE(r.leakage, 1.0);
  EXPECT_LT(std::abs(r.z_final), 1.0);
}

TEST(Chevron, SinglePointMatchesDirectRun) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  const ChevronMap m = x_chevron(p, {9.0}, {6.0});
  EXPECT_EQ(m.values(0, 0), x_gate_sim(p, nullptr, {9.0, 6.0}, f.basis.col(0)).z_final);
  const ChevronMap z = z_chevron(p, 0.02, {0.3}, {20.0});
  const GateRun zr = z_gate_sim(p, {std::polar(0.02, 0.3), 20.0}, f.even);
  EXPECT_EQ(z.values(0, 0), expectation(f.logical_Y, zr.state).real());
}

TEST(Chevron, ThreadCountDoesNotChangeMap) {
  const KerrCatParams p = detuned();
  const ChevronMap a = x_chevron(p, {8.0, 11.0}, {4.0, 6.0}, false, 1);
  const ChevronMap b = x_chevron(p, {8.0, 11.0}, {4.0, 6.0}, false, 3);
  EXPECT_EQ(a.values, b.values);
}

TEST(Chevron, TransferRegionAndExcitedDoubletTunnelsEarlier) {
  const KerrCatParams p = detuned();
  std::vector<double> d0;
  for (int i = 0; i <= 14; ++i) d0.push_back(i);
  const std::vector<double> tg{6.0, 8.0};
  auto first_transfer = [&](const ChevronMap& m) {
    for (Eigen::Index i = 0; i < m.values.rows(); ++i)
      if (m.values.row(i).minCoeff() < 0.0) return m.xs[i];
    return 1e9;
  };
  const ChevronMap ground = x_chevron(p, d0, tg, false, 2);
  const ChevronMap excited = x_chevron(p, d0, tg, true, 2);
  EXPECT_NEAR(ground.values.col(0)(0), 1.0, 0.02);
  const double g = first_transfer(ground), e = first_transfer(excited);
  EXPECT_LT(g, 1e9) << "no transfer from +1 to below 0 in the ground map";
  EXPECT_LT(e, g);
}

TEST(XGate, OptimizerReachesTargetFidelity) {
  const KerrCatParams p = detuned();
  const XGateOptimum opt = optimize_x_gate(p, {8.0, 10.0, 12.0}, {6.0, 8.0});
  EXPECT_GT(opt.fidelity, 0.90);
  const Ptm& r = opt.channel.ptm;
  EXPECT_NEAR(r(0, 0), 1.0 - opt.channel.leakage, 1e-9);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-3);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(r(0, j), 0.0, 1e-3);
  if (opt.channel.leakage < 1e-3) {
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(r(i, 0), 0.0, 1e-3);
  }

  const LogicalChannel twice = x_gate_channel(p, opt.pulse, nullptr, 2);
  const double single = ptm_distance(r, rotation_ptm('x', kPi / 2));
  EXPECT_LT(ptm_distance(twice.ptm, rotation_ptm('x', kPi)), 2.0 * single + 0.02);
}

TEST(ZGate, ImaginaryDriveDoesNotRotate) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  const GateRun r = z_gate_sim(p, {cplx(0.0, 0.02), 100.0}, f.even);
  EXPECT_NEAR(expectation(f.logical_X, r.state).real(), 1.0, 0.02);
  EXPECT_NEAR(expectation(f.logical_Y, r.state).real(), 0.0, 0.02);
}

TEST(ZGate, RotationRateScalesWithAlpha) {
  const RotationFit small = z_rotation_rate({2.0, 1.6, 1.0, 0}, 0.02, 60.0);
  const RotationFit large = z_rotation_rate(detuned(), 0.02, 60.0);
  EXPECT_NEAR(large.rate / small.rate, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
  EXPECT_NEAR(large.rate, 2.0 * 0.02 * std::sqrt(5.2), 0.05 * large.rate);
}

TEST(ZGate, AngleIsLinearOverHalfPeriod) {
  const double omega_c = 2.0 * 0.02 * std::sqrt(5.2);
  const RotationFit r = z_rotation_rate(detuned(), 0.02, kPi / omega_c);
  EXPECT_GT(r.r2, 0.999);
}

TEST(ZGate, QuarterTurnImplementsZ90) {
  const double omega_c = 2.0 * 0.02 * std::sqrt(5.2);
  const LogicalChannel ch = z_gate_channel(detuned(), {0.02, (kPi / 2) / omega_c});
  EXPECT_LT(ptm_distance(ch.ptm, rotation_ptm('z', kPi / 2)), 0.05);
  EXPECT_LT(ch.leakage, 1e-3);
}

TEST(ZGate, PhaseMirrorSymmetry) {
  const KerrCatParams p = detuned();
  const ChevronMap m = z_chevron(p, 0.02, {-1.0, -0.4, 0.4, 1.0}, {10.0, 25.0, 40.0});
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(m.values(0, j), m.values(3, j), 0.02);
    EXPECT_NEAR(m.values(1, j), m.values(2, j), 0.02);
  }
}

TEST(LogicalChannel, IdentityEvolution) {
  const CatFrame f = cat_frame(detuned());
  const LogicalChannel ch = extract_logical_channel(f.basis, f);
  EXPECT_LT((ch.ptm - Ptm::Identity()).norm(), 1e-8);
  EXPECT_LT(ch.leakage, 1e-8);
  const LogicalChannel zero = z_gate_channel(detuned(), {0.02, 0.0});
  EXPECT_LT((zero.ptm - Ptm::Identity()).norm(), 1e-8);
}

TEST(LogicalChannel, AnalyticZ90) {
  const CatFrame f = cat_frame(detuned());
  Eigen::Matrix2cd u;
  u << std::polar(1.0, -kPi / 4), 0, 0, std::polar(1.0, kPi / 4);
  const LogicalChannel ch = extract_logical_channel(CMatrix(f.basis * u), f);
  Ptm expected = Ptm::Zero();
  expected(0, 0) = 1;
  expected(3, 3) = 1;
  expected(2, 1) = 1;   // X -> Y
  expected(1, 2) = -1;  // Y -> -X
  EXPECT_LT((ch.ptm - expected).norm(), 1e-12);

  const CMatrix op = f.basis * u * f.basis.adjoint();
  const LogicalChannel via_map =
      extract_logical_channel([&](const DensityMatrix& rho) -> DensityMatrix { return op * rho * op.adjoint(); }, f);
  EXPECT_LT((via_map.ptm - expected).norm(), 1e-12);
}

TEST(LogicalChannel, LeakageCountsLostPopulation) {
  const CatFrame f = cat_frame(detuned());
  CMatrix out = f.basis;
  out.col(1) = std::sqrt(0.5) * f.basis.col(1) + std::sqrt(0.5) * fock_basis(f.dim - 1, f.dim);
  const LogicalChannel ch = extract_logical_channel(out, f);
  EXPECT_NEAR(ch.leakage, 0.25, 1e-6);
}

TEST(DoubletFrame, GroundPairMatchesCatFrame) {
  const KerrCatParams p = detuned();
  const CatFrame f = cat_frame(p);
  const DoubletFrame d = doublet_frame(p, 0);
  EXPECT_LT((d.basis - f.basis).norm(), 1e-14);
}

TEST(DoubletFrame, ExcitedPairIsLocalizedAndOrthonormal) {
  const KerrCatParams p = detuned();
  const DoubletFrame d = doublet_frame(p, 1);
  EXPECT_LT((d.basis.adjoint() * d.basis - Eigen::Matrix2cd::Identity()).norm(), 1e-10);
  const FockOperator x = (annihilation_op(d.basis.rows()) + creation_op(d.basis.rows())) / std::sqrt(2.0);
  EXPECT_GT(expectation(x, FockState(d.basis.col(0))).real(), 1.0);
  EXPECT_LT(expectation(x, FockState(d.basis.col(1))).real(), -1.0);
  EXPECT_LT(std::abs(d.basis.col(0).dot(cat_frame(p).basis.col(0))), 1e-8);
}
