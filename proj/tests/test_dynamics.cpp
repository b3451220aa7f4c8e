#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "kcq/dynamics.hpp"
#include "kcq/errors.hpp"

using namespace kcq;

namespace {

// T1 = 40 us with K = 2 pi x 1.2 MHz, in units of K.
const double kKappa1 = 1.0 / (40.0 * 2.0 * M_PI * 1.2);

CMatrix sigma_x() {
  CMatrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

std::vector<double> grid(double t1, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(t1 * i / (n - 1));
  return t;
}

// Column-stacked Lindblad superoperator from Kronecker products.
CMatrix kron_superoperator(const CMatrix& h, const std::vector<CollapseOp>& cs) {
  const Eigen::Index d = h.rows();
  const CMatrix I = CMatrix::Identity(d, d);
  const cplx i(0.0, 1.0);
  CMatrix L = -i * (Eigen::kroneckerProduct(I, h).eval() - Eigen::kroneckerProduct(CMatrix(h.transpose()), I).eval());
  for (const auto& c : cs) {
    const CMatrix cdc = c.op.adjoint() * c.op;
    L += c.rate * (Eigen::kroneckerProduct(CMatrix(c.op.conjugate()), c.op).eval() -
                   0.5 * Eigen::kroneckerProduct(I, cdc).eval() -
                   0.5 * Eigen::kroneckerProduct(CMatrix(cdc.transpose()), I).eval());
  }
  return L;
}

NoiseParams kappa1_only() {
  NoiseParams np;
  np.kappa1 = kKappa1;
  return np;
}

}  // namespace

TEST(Schrodinger, ZeroHamiltonianIsStatic) {
  const FockState psi = coherent_state(cplx(0.7, 0.2), 8);
  const auto r = schrodinger_evolve([](double) { return CMatrix(CMatrix::Zero(8, 8)); }, psi, grid(5.0, 6));
  EXPECT_LT((r.state - psi).norm(), 1e-14);
}

TEST(Schrodinger, RabiOscillation) {
  const double omega = 1.3;
  const CMatrix h = 0.5 * omega * sigma_x();
  CMatrix p1 = CMatrix::Zero(2, 2);
  p1(1, 1) = 1;
  FockState psi0(2);
  psi0 << 1, 0;
  const auto t = grid(10.0, 41);
  const auto r = schrodinger_evolve([&](double) { return h; }, psi0, t, {{"p1", p1}});
  const auto& p = r.traj.series("p1");
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(p[k], std::pow(std::sin(omega * t[k] / 2), 2), 1e-6);
}

TEST(Schrodinger, MatchesMatrixExponential) {
  const KerrCatParams p{2.0, 4.2, 1.0, 30};
  const CMatrix h = build_hamiltonian(p);
  const FockState psi0 = coherent_state(1.5, 30);
  const auto r = schrodinger_evolve([&](double) { return h; }, psi0, {0.0, 10.0});
  EXPECT_LT((r.state - expm_hermitian(h, 10.0) * psi0).norm(), 1e-7);
  EXPECT_NEAR(r.traj.series("norm").back(), 1.0, 1e-6);
}

TEST(Schrodinger, RejectsDescendingGrid) {
  EXPECT_THROW(schrodinger_evolve([](double) { return CMatrix(CMatrix::Identity(2, 2)); }, FockState::Ones(2),
                                  {1.0, 0.5}),
               InvalidArgument);
}

TEST(Lindblad, TwoLevelDecay) {
  const double kappa = 0.4;
  CMatrix sm = CMatrix::Zero(2, 2);
  sm(0, 1) = 1;
  CMatrix rho0 = CMatrix::Zero(2, 2);
  rho0(1, 1) = 1;
  CMatrix p1 = CMatrix::Zero(2, 2);
  p1(1, 1) = 1;
  const auto t = grid(8.0, 17);
  const auto r = lindblad_evolve([](double) { return CMatrix(CMatrix::Zero(2, 2)); }, {{"sm", sm, kappa}}, rho0, t,
                                 {{"p1", p1}});
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(r.traj.series("p1")[k], std::exp(-kappa * t[k]), 1e-6);
}

TEST(Lindblad, DephasingKillsCoherencesOnly) {
  const int d = 12;
  const FockState psi = coherent_state(1.0, d);
  const CMatrix rho0 = psi * psi.adjoint();
  const auto r = lindblad_evolve([&](double) { return CMatrix(CMatrix::Zero(d, d)); }, {{"n", number_op(d), 0.3}},
                                 rho0, {0.0, 3.0});
  for (int i = 0; i < d; ++i) {
    EXPECT_NEAR(std::abs(r.state(i, i) - rho0(i, i)), 0.0, 1e-9);
    for (int j = 0; j < d; ++j)
      if (i != j && std::abs(rho0(i, j)) > 1e-6) {
        EXPECT_LT(std::abs(r.state(i, j)), std::abs(rho0(i, j)));
      }
  }
  // Exact: rho_ij(t) = rho_ij(0) exp(-gamma t (i - j)^2 / 2).
  EXPECT_NEAR(std::abs(r.state(0, 1)), std::abs(rho0(0, 1)) * std::exp(-0.3 * 3.0 / 2), 1e-7);
}

TEST(Lindblad, ZeroRatesAgreeWithSchrodinger) {
  const KerrCatParams p{2.0, 4.2, 1.0, 24};
  const CMatrix h = build_hamiltonian(p);
  const FockState psi0 = coherent_state(cplx(1.0, 0.5), 24);
  const auto pure = schrodinger_evolve([&](double) { return h; }, psi0, {0.0, 2.0});
  const auto mixed =
      lindblad_evolve([&](double) { return h; }, standard_collapse_set({}, 24), psi0 * psi0.adjoint(), {0.0, 2.0});
  EXPECT_LT((mixed.state - pure.state * pure.state.adjoint()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Lindblad, MatchesSuperoperatorExponential) {
  const int d = 20;
  const KerrCatParams p{2.0, 4.2, 1.0, d};
  const CMatrix h = build_hamiltonian(p);
  NoiseParams np{0.05, 0.04, 0.03, 0.02, 0.0};
  const auto cs = standard_collapse_set(np, d);
  FockState psi0 = coherent_state(std::sqrt(5.2), d);
  psi0 /= psi0.norm();
  const CMatrix rho0 = psi0 * psi0.adjoint();
  const auto r = lindblad_evolve([&](double) { return h; }, cs, rho0, {0.0, 1.0});
  const CMatrix L = kron_superoperator(h, cs);
  const CVector v = CMatrix(L).exp() * Eigen::Map<const CVector>(rho0.data(), d * d);
  const CMatrix expect = Eigen::Map<const CMatrix>(v.data(), d, d);
  EXPECT_LT((r.state - expect).cwiseAbs().maxCoeff(), 1e-5);
  const DensityCheck c = check_density(r.state);
  EXPECT_LT(c.trace_error, 1e-6);
  EXPECT_LT(c.hermiticity, 1e-8);
  EXPECT_GT(c.min_eigenvalue, -1e-8);
}

TEST(Lindblad, StaticEngineWithAllLevelsMatchesSuperoperator) {
  const int d = 14;
  const CMatrix h = build_hamiltonian({0.0, 3.0, 1.0, d});
  const auto cs = standard_collapse_set({0.1, 0.05, 0.02, 0.01, 0.0}, d);
  const FockState psi0 = coherent_state(1.2, d).normalized();
  const StaticLindblad engine(h, cs, d);
  const auto states = engine.evolve(engine.reduce_state(psi0), {0.0, 0.7, 2.0});
  const CMatrix L = kron_superoperator(h, cs);
  const CMatrix rho0 = psi0 * psi0.adjoint();
  const CVector v = CMatrix(L * 2.0).exp() * Eigen::Map<const CVector>(rho0.data(), d * d);
  const CMatrix expect = Eigen::Map<const CMatrix>(v.data(), d, d);
  EXPECT_LT((engine.expand(states[2]) - expect).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Noise, CollapseSet) {
  const auto cs0 = standard_collapse_set({0.2, 0.0, 0.1, 0.05, 0.0}, 6);
  EXPECT_EQ(cs0[1].rate, 0.0);
  EXPECT_EQ(cs0[3].rate, 0.0);
  const auto cs = standard_collapse_set({0.2, 0.04, 0.0, 0.0, 0.0}, 6);
  EXPECT_NEAR(cs[1].rate / cs[0].rate, 0.04 / 1.04, 1e-15);
  EXPECT_EQ(cs[2].rate, 0.0);
  EXPECT_EQ(cs[4].rate, 0.0);
  EXPECT_NEAR(cs[2].op(0, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(standard_collapse_set({-1.0, 0.0, 0.0, 0.0, 0.0}, 6), InvalidArgument);
  EXPECT_THROW(standard_collapse_set({0.0, 0.6, 0.0, 0.0, 0.0}, 6), InvalidArgument);
}

TEST(QuasiStatic, ZeroNoiseIsSingleRun) {
  int calls = 0;
  auto sim = [&](double shift, std::uint64_t) {
    ++calls;
    Trajectory t;
    t.times = {0.0, 1.0};
    t.add("x") = {1.0 + shift, 2.0};
    return t;
  };
  const Trajectory t = quasi_static_average(sim, 0.0, 32, 9);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(t.series("x")[0], 1.0);
}

TEST(QuasiStatic, IndependentOfThreadCount) {
  auto sim = [](double shift, std::uint64_t) {
    Trajectory t;
    t.times = {0.0, 1.0, 2.0};
    t.add("y") = {std::cos(shift), std::cos(2 * shift), std::cos(3 * shift)};
    return t;
  };
  const Trajectory a = quasi_static_average(sim, 0.3, 50, 11, 1);
  const Trajectory b = quasi_static_average(sim, 0.3, 50, 11, 6);
  EXPECT_EQ(a.values, b.values);
}

TEST(QuasiStatic, DetuningNoiseSpeedsUpDephasing) {
  // At delta = 2K the doublet is degenerate, so only the sampled detuning
  // splits it; a shallow well makes the splitting sensitive to detuning.
  KerrCatParams p{2.0, 0.5, 1.0, 0};
  NoiseParams np = kappa1_only();
  LifetimeOptions opt;
  opt.n_samples = 64;
  opt.threads = 4;
  const auto clean = phase_flip_time(p, np, 0.0, 3, opt);
  np.xi = 0.05;
  const auto noisy = phase_flip_time(p, np, clean.t_max, 3, opt);
  const double r0 = 1.0 / clean.fit.T, r1 = 1.0 / noisy.fit.T;
  const double s = std::hypot(clean.fit.sigma_T * r0 * r0, noisy.fit.sigma_T * r1 * r1);
  EXPECT_GT(r1 - r0, 3.0 * s);
}

TEST(Lifetimes, NoNoiseMeansNoDecay) {
  const KerrCatParams p{2.0, 4.2, 1.0, 0};
  EXPECT_TRUE(bit_flip_time(p, {}, 500.0, 1).fit.lower_bound);
  EXPECT_TRUE(phase_flip_time(p, {}, 500.0, 1).fit.lower_bound);
}

TEST(Lifetimes, PhaseFlipLaw) {
  for (double nbar : {2.6, 5.2, 10.4}) {
    const auto r = phase_flip_time({2.0, nbar - 1.0, 1.0, 0}, kappa1_only(), 0.0, 1);
    const double predicted = 1.0 / (2.0 * nbar * kKappa1);
    EXPECT_NEAR(r.fit.T / predicted, 1.0, 0.15) << nbar;
  }
}

TEST(Lifetimes, PhaseFlipHalvesWithDoubledPhotonNumber) {
  const auto a = phase_flip_time({2.0, 4.2, 1.0, 0}, kappa1_only(), 0.0, 1);
  const auto b = phase_flip_time({2.0, 9.4, 1.0, 0}, kappa1_only(), 0.0, 1);
  EXPECT_NEAR(a.fit.T / b.fit.T, 2.0, 0.3);
}

TEST(Lifetimes, BitFlipMonotoneInDrive) {
  double prev = 0.0;
  for (double e : {1.0, 2.0, 3.0, 4.0}) {
    const auto r = bit_flip_time({0.0, e, 1.0, 0}, kappa1_only(), 0.0, 1);
    ASSERT_FALSE(r.fit.lower_bound);
    EXPECT_GE(r.fit.T, prev) << e;
    prev = r.fit.T;
  }
}

TEST(Lifetimes, DetuningExtendsBitFlipTime) {
  const NoiseParams np{kKappa1, 0.04, 7.0 / (2 * M_PI * 1.2), 1e-4 / (2 * M_PI * 1.2), 0.0};
  const auto t0 = bit_flip_time({0.0, 5.2, 1.0, 0}, np, 0.0, 1);
  const auto t2 = bit_flip_time({2.0, 4.2, 1.0, 0}, np, 0.0, 1);
  EXPECT_GT(t2.fit.T, t0.fit.T);
}

TEST(Initialization, AdiabaticRampWithoutDetuning) {
  const Trajectory t = initialization_sim({0.0, 4.2, 1.0, 0}, {}, 20.0, 0.0);
  EXPECT_LT(t.series("leakage").back(), 0.05);
}

TEST(Initialization, DetunedRampLandsInExcitedState) {
  const Trajectory t = initialization_sim({2.0, 4.2, 1.0, 0}, {}, 20.0, 0.0);
  EXPECT_GT(t.series("leakage").back(), 0.5);
}

TEST(Initialization, StrongTwoPhotonLossRelaxesIntoDissipativeCats) {
  const NoiseParams np{kKappa1, 0.04, 0.93, 0.0, 0.0};
  const Trajectory t = initialization_sim({2.0, 4.2, 1.0, 0}, np, 15.0, 200.0);
  EXPECT_LT(t.series("leakage").back(), 0.05);
  EXPECT_NEAR(t.series("p_plus").back(), t.series("p_minus").back(), 0.05);
}

TEST(Initialization, RelaxationRecoversCodespace) {
  const NoiseParams np{kKappa1, 0.04, 0.0, 0.0, 0.0};
  const Trajectory t = initialization_sim({2.0, 4.2, 1.0, 0}, np, 20.0, 3000.0);
  EXPECT_LT(t.series("leakage").back(), 0.1);
  for (double v : t.series("leakage")) {
    EXPECT_GE(v, -1e-6);
    EXPECT_LE(v, 1.0 + 1e-6);
  }
}
