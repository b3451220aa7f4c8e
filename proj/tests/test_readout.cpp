#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kcq/errors.hpp"
#include "kcq/readout.hpp"

using namespace kcq;

namespace {

CqrParams base() {
  CqrParams c;
  c.eps_cqr = 0.1;
  c.kappa_r = 0.4;
  c.t_read = 2.0;
  c.alpha = std::sqrt(5.2);
  return c;
}

// Noise sigma giving SNR = |b_ss| / sigma.
CqrParams with_snr(double snr, double flip) {
  CqrParams c = base();
  c.noise_sigma = std::abs(cqr_steady_state(c, c.alpha)) / snr;
  c.flip_prob_per_read = flip;
  return c;
}

}  // namespace

TEST(CqrSteadyState, ZeroAndHomogeneity) {
  const CqrParams c = base();
  EXPECT_EQ(cqr_steady_state(c, 0.0), cplx(0.0, 0.0));
  const cplx a(std::sqrt(5.2), 0.3);
  const cplx b = cqr_steady_state(c, a);
  for (double s : {-2.0, 0.5, 3.0}) {
    const cplx bs = cqr_steady_state(c, s * a);
    EXPECT_NEAR(std::abs(bs - s * b), 0.0, 1e-15 * std::abs(s * b));
  }
  EXPECT_GT(cqr_steady_state(c, c.alpha).real(), 0.0);
  EXPECT_NEAR(std::abs(b), 0.5 * std::abs(a), 1e-15);
}

TEST(CqrSteadyState, SingularWithoutLinewidth) {
  CqrParams c = base();
  c.kappa_r = 0.0;
  EXPECT_THROW(cqr_steady_state(c, 1.0), NumericFailure);
}

TEST(CqrTransient, MatchesClosedFormAndOdeOracle) {
  const CqrParams c = base();
  const cplx a(std::sqrt(5.2), 0.0);
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.4 * i);
  const auto b = cqr_transient(c, a, grid);
  const cplx b_inf = cplx(0.0, -1.0) * cqr_steady_state(c, a);

  // RK4 on db/dt = -i eps a - kappa/2 b.
  auto rhs = [&](cplx y) { return cplx(0.0, -c.eps_cqr) * a - 0.5 * c.kappa_r * y; };
  cplx y = 0.0;
  const int sub = 400;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(std::abs(b[i] - b_inf * (1.0 - std::exp(-0.5 * c.kappa_r * grid[i]))), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(b[i] - y), 0.0, 1e-8);
    if (i + 1 < grid.size()) {
      const double h = (grid[i + 1] - grid[i]) / sub;
      for (int s = 0; s < sub; ++s) {
        const cplx k1 = rhs(y), k2 = rhs(y + h / 2 * k1), k3 = rhs(y + h / 2 * k2), k4 = rhs(y + h * k3);
        y += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
  }
}

TEST(CqrTransient, ReachesSteadyStateUpToFixedPhase) {
  const CqrParams c = base();
  const cplx a(std::sqrt(5.2), 0.0);
  const cplx late = cqr_transient(c, a, {20.0 / c.kappa_r})[0];
  const cplx ss = cqr_steady_state(c, a);
  EXPECT_LT(std::abs(cplx(0.0, 1.0) * late - ss), 0.01 * std::abs(ss));
}

TEST(CqrTransient, HalfLife) {
  const CqrParams c = base();
  const double target = 0.5 * std::abs(cqr_steady_state(c, 1.0));
  double lo = 0.0, hi = 100.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(cqr_transient(c, 1.0, {mid})[0]) < target ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 2.0 * std::log(2.0) / c.kappa_r, 1e-6);
}

TEST(CqrTransient, ZeroInputStaysZero) {
  for (cplx v : cqr_transient(base(), 0.0, {0.0, 1.0, 10.0})) EXPECT_EQ(v, cplx(0.0, 0.0));
}

TEST(Readout, NoiselessIsPerfectlyQnd) {
  const ReadoutRun r = simulate_readout(base(), -1, 500, 3);
  EXPECT_EQ(r.qndness, 1.0);
  for (const auto& rec : r.records) EXPECT_EQ(rec.label, -1);
}

TEST(Readout, LabelsAreSignOfRotatedPointer) {
  CqrParams c = with_snr(1.0, 0.1);
  const ReadoutRun r = simulate_readout(c, 1, 2000, 9);
  for (const auto& rec : r.records) EXPECT_EQ(rec.label, rec.pointer.real() >= 0.0 ? 1 : -1);
}

TEST(Readout, EstimatorIsSymmetricUnderLabelFlip) {
  const ReadoutRun r = simulate_readout(with_snr(1.5, 0.07), 1, 5000, 21);
  std::vector<int> flipped;
  for (const auto& rec : r.records) flipped.push_back(-rec.label);
  const ReadoutRun f = qndness_from_labels(flipped);
  EXPECT_EQ(f.qndness, r.qndness);
  EXPECT_EQ(f.p_plus_given_plus, r.p_minus_given_minus);
  EXPECT_EQ(f.p_minus_given_minus, r.p_plus_given_plus);
}

TEST(Readout, FlipsWithoutNoiseGiveOneMinusF) {
  const double f = 0.05;
  const long shots = 10000;
  const ReadoutRun r = simulate_readout(with_snr(1e9, f), 1, shots, 77);
  const double sigma = std::sqrt(f * (1 - f) / shots);
  EXPECT_NEAR(r.qndness, 1.0 - f, 3.0 * sigma);
  EXPECT_NEAR(qndness_markov(f, 0.0, 1, shots), 1.0 - f, 1e-12);
}

TEST(Readout, MonteCarloMatchesMarkovChain) {
  const long shots = 10000;
  int seed = 100;
  for (double f : {0.01, 0.05, 0.2})
    for (double snr : {1.0, 2.0, 5.0}) {
      const CqrParams c = with_snr(snr, f);
      const ReadoutRun r = simulate_readout(c, 1, shots, seed++);
      const double q = qndness_markov(f, misread_probability(c), 1, shots);
      const double sigma = std::sqrt(q * (1 - q) / shots);
      EXPECT_NEAR(r.qndness, q, 3.0 * sigma) << "f=" << f << " snr=" << snr;
    }
}

TEST(Readout, HighQndnessIsAttainable) {
  const CqrParams c = with_snr(5.0, 0.01);
  EXPECT_GE(qndness_markov(0.01, misread_probability(c), 1, 10000), 0.98);
  EXPECT_GE(simulate_readout(c, 1, 10000, 5).qndness, 0.98);
}

TEST(Readout, MisreadProbability) {
  EXPECT_NEAR(misread_probability(with_snr(1.0, 0.0)), 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_EQ(misread_probability(base()), 0.0);
}

TEST(Readout, DeterministicForSeed) {
  const CqrParams c = with_snr(2.0, 0.05);
  const ReadoutRun a = simulate_readout(c, 1, 300, 42), b = simulate_readout(c, 1, 300, 42);
  for (std::size_t k = 0; k < a.records.size(); ++k) EXPECT_EQ(a.records[k].pointer, b.records[k].pointer);
  EXPECT_NE(simulate_readout(c, 1, 300, 43).records[0].pointer, a.records[0].pointer);
}

TEST(Readout, RejectsBadInput) {
  CqrParams c = base();
  EXPECT_THROW(simulate_readout(c, 0, 10, 1), InvalidArgument);
  EXPECT_THROW(simulate_readout(c, 1, 1, 1), InvalidArgument);
  c.flip_prob_per_read = 0.6;
  EXPECT_THROW(simulate_readout(c, 1, 10, 1), InvalidArgument);
  c = base();
  c.noise_sigma = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Readout, FlipProbabilityFromBitFlipTime) {
  EXPECT_DOUBLE_EQ(flip_prob_from_tz(2.0, 100.0), 0.01);
  EXPECT_EQ(flip_prob_from_tz(1.0, 0.5), 0.5);
  EXPECT_THROW(flip_prob_from_tz(1.0, 0.0), InvalidArgument);
}
