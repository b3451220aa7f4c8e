#pragma once

// Gate set tomography on the {X(pi/2), Y(pi/2), Z(pi/2)} gate set: circuit
// generation from germs and fiducials, dataset simulation, linear-inversion
// estimation with gauge optimization, and an optional long-sequence
// least-squares refinement.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kcq/channel.hpp"

namespace kcq {

/// Gate labels in time order ("Gx", "Gy", "Gz"). Empty means no gates.
using GateString = std::vector<std::string>;

std::string to_string(const GateString& s);  // "Gx Gz", "{}" when empty
GateString parse_gate_string(const std::string& text);

struct GstDesign {
  std::vector<GateString> germs;
  std::vector<GateString> fiducials;  // used for both preparation and measurement
  std::vector<int> max_lengths;
};

/// Ten germs of length up to 5, fiducials {Gx, Gy, Gx Gx, {}},
/// L in {0, 1, 2, 4, ..., 128}.
GstDesign default_gst_design();

struct GstCircuit {
  int max_length = 0;
  int germ = 0;
  int reps = 0;
  int prep = 0;  // fiducial applied first
  int meas = 0;  // fiducial applied last
  GateString gates;
};

/// For each (L, germ, i, j): F_i germ^l F_j with l = floor(L / len(germ));
/// L = 0 gives the bare fiducial pairs. Duplicate gate strings keep their
/// first occurrence in (L, germ, i, j) order.
std::vector<GstCircuit> gst_generate(const GstDesign& design);

struct GateNoiseModel {
  std::map<std::string, Ptm> gates;
  Eigen::Vector4d rho{1.0, 0.0, 0.0, 1.0};     // |0><0| in Pauli components
  Eigen::Vector4d effect{0.5, 0.0, 0.0, 0.5};  // outcome 0: p0 = effect . (G rho)
  void validate() const;
};

GateNoiseModel ideal_gate_set();
/// Y(pi/2) compiled as Z(pi/2), X(pi/2), Z(pi/2) then a noise-free virtual X(pi).
Ptm compile_gy(const Ptm& gx, const Ptm& gz);
/// Gx = exp(L_x) X(pi/2), Gz = exp(L_z) Z(pi/2), Gy compiled from both.
GateNoiseModel noisy_gate_set(const ErrorGenerator& gx_error, const ErrorGenerator& gz_error);

/// Probability of outcome 0. Throws NumericFailure outside [-1e-9, 1 + 1e-9].
double circuit_probability(const GateString& s, const GateNoiseModel& model);

struct GstDataset {
  std::vector<GateString> circuits;
  std::vector<double> n0, n1;  // analytic mode stores probabilities
  long shots = 0;              // 0: analytic
  double frequency(std::size_t i) const { return n0[i] / (n0[i] + n1[i]); }
};

GstDataset gst_simulate(const std::vector<GateString>& circuits, const GateNoiseModel& model, long shots,
                        std::uint64_t seed, int threads = 1);

struct GstOptions {
  bool gauge_optimize = true;
  bool refine = false;  // long-sequence least squares after LGST
  GstDesign design = default_gst_design();
};

struct GstEstimate {
  std::map<std::string, Ptm> gates;
  double gram_condition = 0.0;
  bool refined = false;
  double chi2 = 0.0;  // refinement objective, 0 without refinement
};

/// Linear inversion in the gauge of ideal fiducials and SPAM, followed by
/// the requested gauge optimization and refinement.
GstEstimate lgst_estimate(const GstDataset& data, const GstOptions& opt = {});

/// Gauge transform T (first row fixed) minimizing sum ||T^-1 G T - target||_F^2.
std::map<std::string, Ptm> gauge_optimize(const std::map<std::string, Ptm>& estimate,
                                          const std::map<std::string, Ptm>& target);

/// Error generator of an estimate relative to its ideal gate.
GeneratorFit gate_error_generator(const Ptm& estimate, const Ptm& ideal);

}  // namespace kcq
