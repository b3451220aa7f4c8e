#pragma once

// Cat-quadrature readout: a beam-splitter drives a readout resonator to a
// pointer amplitude proportional to <a>, and consecutive reads give the
// QNDness figure of merit.

#include <cstdint>
#include <vector>

#include "kcq/fock.hpp"

namespace kcq {

struct CqrParams {
  double eps_cqr = 0.0;             // beam-splitter rate
  double kappa_r = 1.0;             // readout resonator linewidth
  double t_read = 1.0;              // integration window
  double alpha = 1.0;               // |<a>| of the cat wells
  double noise_sigma = 0.0;         // Gaussian noise per quadrature on the pointer
  double flip_prob_per_read = 0.0;  // state flip between consecutive reads

  /// All fields >= 0, alpha > 0, flip probability <= 0.5.
  void validate() const;
};

/// 2 eps_cqr / kappa_r * a_expect, real positive for the +alpha well.
/// Throws NumericFailure when kappa_r = 0.
cplx cqr_steady_state(const CqrParams& c, cplx a_expect);

/// Exact solution of db/dt = -i eps a - (kappa/2) b with b(0) = 0. Its
/// long-time limit is -i times cqr_steady_state; the steady-state helper
/// drops that fixed phase so the +alpha pointer lies on the positive real axis.
std::vector<cplx> cqr_transient(const CqrParams& c, cplx a_expect, const std::vector<double>& t_grid);

struct ReadoutRecord {
  cplx pointer;
  int label = 1;  // +1 for the +alpha well
  int state = 1;  // well occupied during the read
};

struct ReadoutRun {
  std::vector<ReadoutRecord> records;
  double p_plus_given_plus = 0.0;  // NaN when no read was labelled +
  double p_minus_given_minus = 0.0;
  double qndness = 0.0;            // mean of the defined conditionals
  long pairs_plus = 0, pairs_minus = 0;
};

/// `shots` consecutive reads starting in `true_state` (+1 or -1). Each read
/// reports pointer = +/- steady value + complex Gaussian noise and labels it
/// by the sign of the real part after rotating the steady value onto the
/// real axis; the well flips with flip_prob_per_read after every read.
/// Read k draws from the stream keyed (seed, k).
ReadoutRun simulate_readout(const CqrParams& c, int true_state, long shots, std::uint64_t seed);

/// QNDness estimate from a label sequence: P[+|+] and P[-|-] over consecutive
/// pairs, averaged over whichever of the two is defined.
ReadoutRun qndness_from_labels(const std::vector<int>& labels);

/// Probability that one read mislabels the well: Phi(-|b_ss| / sigma).
double misread_probability(const CqrParams& c);

/// Expected QNDness of the two-state chain started in `true_state`, with
/// P[+|+] and P[-|-] taken as ratios of expected pair counts over `shots`
/// reads. With no misreads this is exactly 1 - f.
double qndness_markov(double flip_prob, double misread, int true_state, long shots);

/// Small-error flip probability of one read window: t_read / (2 T_z),
/// capped at 0.5.
double flip_prob_from_tz(double t_read, double T_z);

}  // namespace kcq
