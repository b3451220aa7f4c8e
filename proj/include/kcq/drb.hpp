#pragma once

// Dihedral randomized benchmarking: circuit sampling, character-weighted
// survival tables, decay fits and the scaling-factor calibration.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kcq/channel.hpp"
#include "kcq/dihedral.hpp"
#include "kcq/fitting.hpp"

namespace kcq {

/// Virtual Pauli applied before the dihedral sequence: 0..3 = I, X, Y, Z.
int drb_character(int basis, int pauli);

struct DrbCircuit {
  int basis = 1;  // 1: prepare |0>, measure Z; 2: prepare |+>, measure X
  int depth = 0;
  int pauli = 0;
  double character = 1.0;
  std::vector<DihedralElement> gates;  // D_1 .. D_{n+1}, time order
  std::uint64_t seed = 0;
  /// "P:Y D:3,0 D:0,1 ... INV:5,1"
  std::string text() const;
};

DrbCircuit drb_sample(int depth, int basis, std::uint64_t seed);

/// Noise placement: every element carries one noisy Z(k pi/4) channel
/// except the pure virtual X(pi) (k=0, b=1) and the initial Pauli.
struct DrbNoise {
  Ptm z_noise = Ptm::Identity();
  Ptm x_noise = Ptm::Identity();  // only applied to (k=0, b=1)
  bool identity_is_noisy = true;  // (k=0, b=0) as a physical Z(0)
  double prep_error = 0.0;        // flip probability of the prepared state
  double meas_error = 0.0;        // readout assignment error
  void validate() const;
};

/// Pauli channel with the given flip probabilities.
Ptm pauli_channel(double px, double py, double pz);

Ptm noisy_element_ptm(const DihedralElement& g, const DrbNoise& noise);

/// Expectation of the measured Pauli for one circuit.
double drb_expectation(const DrbCircuit& c, const DrbNoise& noise);

enum class DrbMode {
  sampled,   // binomial shots per circuit
  analytic,  // exact probabilities per sampled circuit
  exact,     // average over every circuit (no sampling at all)
};

struct DrbOptions {
  std::vector<int> depths;
  int samples = 50;
  long shots = 1024;
  DrbMode mode = DrbMode::sampled;
  int threads = 1;
};

struct DrbTable {
  std::vector<int> depths;
  std::array<std::vector<double>, 2> survival;  // index 0: basis 1
  std::array<std::vector<double>, 2> stderr_;
  int samples = 0;
  long shots = 0;
  DrbMode mode = DrbMode::sampled;
};

/// Seed of the circuit drb_run draws for (basis, depth, sample).
std::uint64_t drb_circuit_seed(std::uint64_t seed, int basis, int depth, int sample);

DrbTable drb_run(const DrbNoise& noise, const DrbOptions& opt, std::uint64_t seed);

/// Exact average survival over all circuits of depth n.
double drb_exact_survival(int depth, int basis, const DrbNoise& noise);

struct DrbFitOptions {
  double scale_bit = 1.07;
  double scale_ph = 1.02;
  bool simple_phase = false;  // p_ph = (1 - lambda2) / 2
};

struct DrbResult {
  double lambda1 = 1.0, lambda2 = 1.0;
  double sigma_lambda1 = 0.0, sigma_lambda2 = 0.0;
  double A1 = 1.0, A2 = 1.0;
  double p_bit_raw = 0.0, p_ph_raw = 0.0;  // before scaling
  double p_bit = 0.0, p_ph = 0.0;
  double sigma_p_bit = 0.0, sigma_p_ph = 0.0;
  double eta = 0.0;
  bool eta_lower_bound = false;  // p_bit not resolved; eta is a lower bound
  double scale_bit = 1.0, scale_ph = 1.0;
};

DrbResult drb_fit(const DrbTable& table, const DrbFitOptions& opt = {});

struct CalibrationOptions {
  double bit_ratio = 0.02;  // p_bit,real = bit_ratio * p_ph,real
  std::vector<int> depths = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
  int samples = 50;
  long shots = 1024;
  DrbMode mode = DrbMode::analytic;
  int threads = 1;
};

struct CalibrationRow {
  double real_bit = 0.0, real_ph = 0.0;
  double extracted_bit = 0.0, extracted_ph = 0.0;
};

struct CalibrationResult {
  double scale_bit = 0.0, scale_ph = 0.0;
  std::vector<CalibrationRow> rows;
};

/// Injects p_x = p_y = bit_ratio p / 2, p_z = p on every Z element for each
/// p in the grid and regresses real on extracted errors through the origin.
CalibrationResult drb_scaling_calibration(const std::vector<double>& grid, std::uint64_t seed,
                                          const CalibrationOptions& opt = {});

}  // namespace kcq
