#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kcq/drb.hpp"
#include "kcq/errors.hpp"
#include "kcq/rng.hpp"

using namespace kcq;
using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;

namespace {

M2 pauli(int i) {
  M2 p;
  switch (i) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, C(0, -1), C(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

M2 element_unitary(const DihedralElement& g) {
  const double th = g.k * std::numbers::pi / 4;
  M2 z = M2::Zero();
  z(0, 0) = std::exp(C(0, -th / 2));
  z(1, 1) = std::exp(C(0, th / 2));
  return g.b ? M2(z * pauli(1)) : z;
}

bool same_up_to_phase(const M2& a, const M2& b) {
  const C overlap = (a.adjoint() * b).trace() / 2.0;
  return std::abs(std::abs(overlap) - 1.0) < 1e-12 && (a * overlap - b).norm() < 1e-12;
}

// Density-matrix simulation with Pauli noise written as Kraus operators.
double density_expectation(const DrbCircuit& c, const std::array<double, 3>& p, bool identity_noisy) {
  M2 rho;
  if (c.basis == 1)
    rho << 1, 0, 0, 0;
  else
    rho << 0.5, 0.5, 0.5, 0.5;
  rho = pauli(c.pauli) * rho * pauli(c.pauli);
  for (const auto& g : c.gates) {
    const M2 u = element_unitary(g);
    rho = u * rho * u.adjoint();
    const bool noisy = !(g.k == 0 && g.b == 1) && (identity_noisy || !(g.k == 0 && g.b == 0));
    if (noisy) {
      M2 out = (1.0 - p[0] - p[1] - p[2]) * rho;
      for (int m = 0; m < 3; ++m) out += p[m] * pauli(m + 1) * rho * pauli(m + 1);
      rho = out;
    }
  }
  return (pauli(c.basis == 1 ? 3 : 1) * rho).trace().real();
}

DrbNoise pauli_noise(double px, double py, double pz) {
  DrbNoise n;
  n.z_noise = pauli_channel(px, py, pz);
  return n;
}

// Average character-weighted survival over every circuit of depth n.
double enumerate_survival(int n, int basis, const DrbNoise& noise) {
  const auto elements = dihedral_elements();
  double total = 0.0;
  long count = 0;
  std::vector<int> idx(n, 0);
  for (;;) {
    for (int p = 0; p < 4; ++p) {
      DrbCircuit c;
      c.basis = basis;
      c.depth = n;
      c.pauli = p;
      c.character = drb_character(basis, p);
      DihedralElement prod{};
      for (int j = 0; j < n; ++j) {
        c.gates.push_back(elements[idx[j]]);
        prod = dihedral_compose(elements[idx[j]], prod);
      }
      c.gates.push_back(dihedral_inverse(prod));
      total += c.character * drb_expectation(c, noise);
      ++count;
    }
    int j = 0;
    while (j < n && ++idx[j] == 16) idx[j++] = 0;
    if (j == n) break;
  }
  return total / count;
}

}  // namespace

TEST(Dihedral, ComposeExamples) {
  EXPECT_EQ(dihedral_compose({0, 1}, {0, 1}), (DihedralElement{0, 0}));
  EXPECT_EQ(dihedral_compose({3, 0}, {7, 0}), (DihedralElement{2, 0}));
  EXPECT_THROW(dihedral_compose({8, 0}, {0, 0}), InvalidArgument);
}

TEST(Dihedral, RepresentationIsFaithful) {
  const auto el = dihedral_elements();
  for (const auto& g1 : el)
    for (const auto& g2 : el) {
      const DihedralElement g = dihedral_compose(g1, g2);
      EXPECT_LT((element_ptm(g) - element_ptm(g1) * element_ptm(g2)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_TRUE(same_up_to_phase(element_unitary(g), element_unitary(g1) * element_unitary(g2)));
    }
  for (const auto& g : el) {
    EXPECT_EQ(dihedral_compose(g, dihedral_inverse(g)), (DihedralElement{0, 0}));
    EXPECT_EQ(dihedral_compose(dihedral_inverse(g), g), (DihedralElement{0, 0}));
    EXPECT_LT((unitary_ptm(element_unitary(g)) - element_ptm(g)).cwiseAbs().maxCoeff(), 1e-12);
  }
  // 16 distinct PTMs.
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) EXPECT_GT((element_ptm(el[i]) - element_ptm(el[j])).norm(), 0.5);
}

TEST(Dihedral, Associativity) {
  const auto el = dihedral_elements();
  for (const auto& a : el)
    for (const auto& b : el)
      for (const auto& c : el) {
        const Ptm lhs = element_ptm(dihedral_compose(dihedral_compose(a, b), c));
        const Ptm rhs = element_ptm(dihedral_compose(a, dihedral_compose(b, c)));
        ASSERT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
      }
}

TEST(Dihedral, ElementPtmExamples) {
  EXPECT_LT((element_ptm({0, 0}) - Ptm::Identity()).norm(), 1e-15);
  const Ptm z90 = element_ptm({2, 0});
  EXPECT_NEAR(z90(2, 1), 1.0, 1e-15);   // X -> Y
  EXPECT_NEAR(z90(1, 2), -1.0, 1e-15);  // Y -> -X
  Ptm x = Ptm::Identity();
  x.diagonal() << 1, 1, -1, -1;
  EXPECT_LT((element_ptm({0, 1}) - x).norm(), 1e-15);
}

TEST(DrbSample, InversionInvariant) {
  for (int s = 0; s < 1000; ++s) {
    const DrbCircuit c = drb_sample(1 + s % 37, 1 + s % 2, 1234 + s);
    ASSERT_EQ(c.gates.size(), static_cast<std::size_t>(c.depth + 1));
    DihedralElement prod{};
    for (const auto& g : c.gates) prod = dihedral_compose(g, prod);
    ASSERT_EQ(prod, (DihedralElement{0, 0}));
  }
  EXPECT_THROW(drb_sample(0, 1, 1), InvalidArgument);
  EXPECT_THROW(drb_sample(3, 3, 1), InvalidArgument);
}

TEST(DrbSample, NoiselessOutcomeMatchesCharacter) {
  const DrbNoise ideal;
  for (int s = 0; s < 200; ++s) {
    const DrbCircuit c = drb_sample(1 + s % 20, 1 + s % 2, 99 + s);
    EXPECT_NEAR(drb_expectation(c, ideal), c.character, 1e-12);
    EXPECT_NEAR(density_expectation(c, {0, 0, 0}, true), c.character, 1e-12);
  }
}

TEST(DrbSample, TextFormat) {
  DrbCircuit c;
  c.pauli = 2;
  c.gates = {{3, 0}, {0, 1}, {5, 1}};
  EXPECT_EQ(c.text(), "P:Y D:3,0 D:0,1 INV:5,1");
  EXPECT_EQ(drb_sample(5, 1, 42).text(), drb_sample(5, 1, 42).text());
}

TEST(DrbSample, CharactersTable) {
  EXPECT_EQ(drb_character(1, 0), 1);
  EXPECT_EQ(drb_character(1, 3), 1);
  EXPECT_EQ(drb_character(1, 1), -1);
  EXPECT_EQ(drb_character(1, 2), -1);
  EXPECT_EQ(drb_character(2, 0), 1);
  EXPECT_EQ(drb_character(2, 1), 1);
  EXPECT_EQ(drb_character(2, 2), -1);
  EXPECT_EQ(drb_character(2, 3), -1);
}

TEST(DrbExpectation, MatchesDensityMatrixSimulation) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 0.02);
  for (int s = 0; s < 100; ++s) {
    const std::array<double, 3> p{u(gen), u(gen), u(gen)};
    DrbNoise noise = pauli_noise(p[0], p[1], p[2]);
    noise.identity_is_noisy = s % 3 != 0;
    const DrbCircuit c = drb_sample(1 + s % 64, 1 + s % 2, 7000 + s);
    EXPECT_NEAR(drb_expectation(c, noise), density_expectation(c, p, noise.identity_is_noisy), 1e-12);
  }
}

TEST(DrbExact, MatchesExhaustiveEnumeration) {
  const DrbNoise noise = pauli_noise(3e-3, 1e-3, 0.02);
  DrbNoise coherent = noise;
  coherent.z_noise = coherent.z_noise * rotation_ptm('x', 0.05) * rotation_ptm('z', 0.03);
  for (const DrbNoise* n : std::array<const DrbNoise*, 2>{&noise, &coherent})
    for (int basis = 1; basis <= 2; ++basis)
      for (int depth = 1; depth <= 3; ++depth)
        EXPECT_NEAR(drb_exact_survival(depth, basis, *n), enumerate_survival(depth, basis, *n), 1e-12)
            << basis << " " << depth;
}

TEST(DrbExact, DecayLawWithNoisyWeight) {
  for (const auto& p : std::vector<std::array<double, 3>>{{1e-4, 1e-4, 1e-2}, {1e-3, 1e-3, 4e-3}, {5e-3, 5e-3, 0.0}}) {
    const DrbNoise noise = pauli_noise(p[0], p[1], p[2]);
    const Ptm t = dihedral_twirl(noise.z_noise);
    const std::array<double, 2> lam{(15 * t(3, 3) + 1) / 16, (15 * t(1, 1) + 1) / 16};
    for (int basis = 1; basis <= 2; ++basis) {
      // Subleading terms of the group average die off within a few steps.
      const double a = drb_exact_survival(4, basis, noise) / std::pow(lam[basis - 1], 4);
      for (int n = 4; n <= 64; n += 3)
        EXPECT_NEAR(drb_exact_survival(n, basis, noise), a * std::pow(lam[basis - 1], n), 1e-10) << n;
    }
  }
}

TEST(DrbRun, NoiseFreeSurvivesEverywhere) {
  for (DrbMode mode : {DrbMode::sampled, DrbMode::analytic, DrbMode::exact}) {
    const DrbTable t = drb_run(DrbNoise{}, {{1, 5, 20}, 10, 100, mode, 1}, 3);
    for (int b = 0; b < 2; ++b)
      for (double s : t.survival[b]) EXPECT_NEAR(s, 1.0, 1e-12);
    const DrbResult r = drb_fit(t);
    EXPECT_EQ(r.p_bit, 0.0);
    EXPECT_EQ(r.p_ph, 0.0);
    EXPECT_TRUE(r.eta_lower_bound);
  }
}

TEST(DrbRun, RejectsBadInput) {
  EXPECT_THROW(drb_run(DrbNoise{}, {{4}, 10, 100, DrbMode::sampled, 1}, 1), InvalidArgument);
  EXPECT_THROW(drb_run(DrbNoise{}, {{4, 4}, 10, 100, DrbMode::sampled, 1}, 1), InvalidArgument);
  DrbNoise bad;
  bad.z_noise(0, 1) = 0.1;
  EXPECT_THROW(drb_run(bad, {{1, 2}, 10, 100, DrbMode::sampled, 1}, 1), InvalidArgument);
  EXPECT_THROW(pauli_channel(-0.1, 0, 0), InvalidArgument);
}

TEST(DrbRun, AnalyticModeAveragesCircuitExpectations) {
  const DrbNoise noise = pauli_noise(1e-3, 2e-3, 5e-3);
  const std::uint64_t seed = 77;
  const DrbTable t = drb_run(noise, {{3, 9}, 8, 0, DrbMode::analytic, 1}, seed);
  for (int basis = 1; basis <= 2; ++basis)
    for (std::size_t d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (std::uint64_t s = 0; s < 8; ++s) {
        const int n = t.depths[d];
        const DrbCircuit c =
            drb_sample(n, basis, rng::derive(seed, {std::uint64_t(basis), std::uint64_t(n), s}));
        mean += c.character * density_expectation(c, {1e-3, 2e-3, 5e-3}, true);
      }
      EXPECT_NEAR(t.survival[basis - 1][d], mean / 8, 1e-12);
    }
}

TEST(DrbRun, DeterministicAcrossThreads) {
  const DrbNoise noise = pauli_noise(1e-3, 1e-3, 5e-3);
  const DrbTable a = drb_run(noise, {{2, 8, 32}, 20, 256, DrbMode::sampled, 1}, 9);
  const DrbTable b = drb_run(noise, {{2, 8, 32}, 20, 256, DrbMode::sampled, 4}, 9);
  EXPECT_EQ(a.survival, b.survival);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(DrbFit, SampledRecoveryWithinThreeSigma) {
  const double px = 1e-4, py = 1e-4, pz = 1e-2;
  const DrbNoise noise = pauli_noise(px, py, pz);
  std::vector<int> depths;
  for (int n = 2; n <= 2048; n *= 2) depths.push_back(n);
  const auto start = std::chrono::steady_clock::now();
  const DrbTable t = drb_run(noise, {depths, 50, 1024, DrbMode::sampled, 1}, 2024);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 60.0);
  const DrbResult r = drb_fit(t);
  // Pre-scaling targets: the dihedral-twirl relations with 15/16 of the
  // elements carrying noise.
  const double w = 15.0 / 16.0;
  EXPECT_NEAR(r.p_bit_raw, w * (px + py), 3 * r.sigma_p_bit / r.scale_bit);
  EXPECT_NEAR(r.p_ph_raw, w * pz, 3 * r.sigma_p_ph / r.scale_ph);
  EXPECT_NEAR(r.p_bit, 1.07 * r.p_bit_raw, 1e-15);
  EXPECT_NEAR(r.p_ph, 1.02 * r.p_ph_raw, 1e-15);
  EXPECT_GT(r.eta, 0.0);
  EXPECT_LE(r.lambda1, 1.0 + 1e-6);
}

TEST(DrbFit, HighBiasRepresentable) {
  // p_bit = 8e-5, p_ph = 0.02: eta = 250.
  const DrbNoise noise = pauli_noise(4e-5, 4e-5, 0.02);
  const DrbTable t = drb_run(noise, {{2, 8, 32, 128, 512, 2048}, 0, 0, DrbMode::exact, 1}, 1);
  const DrbResult r = drb_fit(t, {1.0, 1.0, false});
  EXPECT_FALSE(r.eta_lower_bound);
  EXPECT_NEAR(r.eta, 250.0, 1e-3);
  EXPECT_TRUE(std::isfinite(r.sigma_p_bit));
}

TEST(DrbFit, SimplePhaseOption) {
  const DrbNoise noise = pauli_noise(1e-3, 1e-3, 1e-2);
  const DrbTable t = drb_run(noise, {{2, 8, 32, 128}, 0, 0, DrbMode::exact, 1}, 1);
  const DrbResult a = drb_fit(t, {1.0, 1.0, false});
  const DrbResult b = drb_fit(t, {1.0, 1.0, true});
  EXPECT_NEAR(b.p_ph_raw - a.p_ph_raw, a.p_bit_raw / 2, 1e-12);
  EXPECT_THROW(drb_fit(DrbTable{{1, 2}, {}, {}, 0, 0, DrbMode::exact}), InvalidArgument);
}

TEST(Calibration, ZeroPointAndNoisyWeightSlopes) {
  CalibrationOptions opt;
  opt.mode = DrbMode::exact;
  const CalibrationResult r = drb_scaling_calibration({0.0, 0.01, 0.02, 0.03}, 5, opt);
  EXPECT_EQ(r.rows[0].extracted_bit, 0.0);
  EXPECT_EQ(r.rows[0].extracted_ph, 0.0);
  // With 1 of 16 elements noise-free every extracted error is 15/16 of the
  // injected one.
  EXPECT_NEAR(r.scale_bit, 16.0 / 15.0, 1e-4);
  EXPECT_NEAR(r.scale_ph, 16.0 / 15.0, 1e-4);
}

TEST(Calibration, ShotCountIndependence) {
  CalibrationOptions opt;
  opt.samples = 20;
  opt.mode = DrbMode::analytic;
  const std::vector<double> grid{0.01, 0.02, 0.03};
  const CalibrationResult a = drb_scaling_calibration(grid, 8, opt);
  opt.mode = DrbMode::sampled;
  opt.shots = 1000000;
  const CalibrationResult b = drb_scaling_calibration(grid, 8, opt);
  EXPECT_NEAR(a.scale_ph, b.scale_ph, 1e-3);
  EXPECT_NEAR(a.scale_bit, b.scale_bit, 1e-3);
}

TEST(Calibration, RejectsDegenerateGrid) {
  EXPECT_THROW(drb_scaling_calibration({}, 1), InvalidArgument);
  EXPECT_THROW(drb_scaling_calibration({0.0, 0.0}, 1), InvalidArgument);
  EXPECT_THROW(drb_scaling_calibration({0.05}, 1), InvalidArgument);
}
