#pragma once

// Pulse-level gates on the cat qubit: Z(theta) from a single-photon drive,
// X(pi/2) from phase modulation of the two-photon drive, Chevron sweeps and
// logical channel extraction.

#include <functional>
#include <string>
#include <vector>

#include "kcq/channel.hpp"
#include "kcq/dynamics.hpp"
#include "kcq/model.hpp"

namespace kcq {

struct XGatePulse {
  double delta0 = 0.0;  // modulation depth
  double t_gate = 1.0;  // T_g
};

struct ZGatePulse {
  cplx omega{0.0, 0.0};  // single-photon drive
  double duration = 0.0;
};

/// g(t) = -delta0 t sin(1.5 pi t / T_g)                          for t <= T_g / 3
///      = -delta0 t f(t) (f(t) - f(T_g)) / (1 - f(T_g))          otherwise,
/// with f(t) = exp(-8 (t - T_g/3)^2 / T_g^2).
double modulation_phase(double t, const XGatePulse& pulse);

/// Delta n + eps2 e^{-i g(t)} a^dag^2 + h.c. - K a^dag^2 a^2.
HamiltonianFn x_gate_hamiltonian(const KerrCatParams& p, const XGatePulse& pulse);
/// Static Hamiltonian plus (Omega a^dag + Omega^* a) / 2.
FockOperator z_gate_hamiltonian(const KerrCatParams& p, cplx omega);

/// Two-level frame of one doublet of the static Hamiltonian. Pair 0 is the
/// cat codespace (identical to cat_frame); pair j >= 1 is the j-th excited
/// doublet with |0> localized in the +x well.
struct DoubletFrame {
  CMatrix basis;  // dim x 2
  FockOperator logical_Z;
};
DoubletFrame doublet_frame(const KerrCatParams& p, int pair);

struct GateRun {
  FockState state;        // closed system
  DensityMatrix rho;      // open system (empty when closed)
  double z_initial = 0.0; // <Z> projected on the frame used for the run
  double z_final = 0.0;
  double leakage = 0.0;   // 1 - population left in that doublet
};

/// Evolves psi0 through one X pulse. np == nullptr runs the closed system.
/// <Z> uses `frame` (the codespace by default).
GateRun x_gate_sim(const KerrCatParams& p, const NoiseParams* np, const XGatePulse& pulse, const FockState& psi0,
                   const DoubletFrame* frame = nullptr, const OdeOptions& ode = {});

GateRun z_gate_sim(const KerrCatParams& p, const ZGatePulse& pulse, const FockState& psi0,
                   const OdeOptions& ode = {});

/// Logical rotation of a Z drive: unwrapped angle atan2(<Y>, <X>) of |+X>
/// sampled on [0, t_max], with slope and R^2 of a linear fit.
struct RotationFit {
  std::vector<double> times, angles;
  double rate = 0.0;
  double r2 = 0.0;
};
RotationFit z_rotation_rate(const KerrCatParams& p, cplx omega, double t_max, int n_points = 41,
                            const OdeOptions& ode = {});

struct LogicalChannel {
  Ptm ptm = Ptm::Identity();
  double leakage = 0.0;  // population leaving the codespace, averaged over inputs
};

/// Channel from the evolved codespace basis: `evolved` holds U|0_L>, U|1_L>
/// as columns.
LogicalChannel extract_logical_channel(const CMatrix& evolved, const CatFrame& frame);
/// Channel from a linear map on density operators (open-system gates).
LogicalChannel extract_logical_channel(const std::function<DensityMatrix(const DensityMatrix&)>& gate,
                                       const CatFrame& frame);

/// Logical channel of `count` back-to-back X pulses (closed system, or
/// Lindblad when np is given).
LogicalChannel x_gate_channel(const KerrCatParams& p, const XGatePulse& pulse, const NoiseParams* np = nullptr,
                              int count = 1, const OdeOptions& ode = {});
LogicalChannel z_gate_channel(const KerrCatParams& p, const ZGatePulse& pulse, const OdeOptions& ode = {});

/// Frobenius norm of the difference.
double ptm_distance(const Ptm& a, const Ptm& b);

struct ChevronMap {
  std::string x_name, t_name, value_name;
  std::vector<double> xs, ts;
  Eigen::MatrixXd values;  // values(i, j) at (xs[i], ts[j])
};

/// Final <Z> after an X pulse for every (delta0, T_g). With `excited` the
/// input is the +x-well state of the first excited doublet and <Z> is taken
/// in that doublet.
ChevronMap x_chevron(const KerrCatParams& p, const std::vector<double>& delta0_grid,
                     const std::vector<double>& t_gate_grid, bool excited = false, int threads = 1,
                     const OdeOptions& ode = {});

/// Final <Y> of |+X> after a Z drive |Omega| e^{i phase} for every
/// (phase, duration).
ChevronMap z_chevron(const KerrCatParams& p, double omega_abs, const std::vector<double>& phase_grid,
                     const std::vector<double>& duration_grid, int threads = 1, const OdeOptions& ode = {});

struct XGateOptimum {
  XGatePulse pulse;
  double fidelity = 0.0;
  LogicalChannel channel;
  int evaluations = 0;
};

/// Coarse grid over (delta0, T_g), then Nelder-Mead on the process
/// infidelity against X(pi/2) in the closed system.
XGateOptimum optimize_x_gate(const KerrCatParams& p, const std::vector<double>& delta0_grid,
                             const std::vector<double>& t_gate_grid, int threads = 1, const OdeOptions& ode = {});

}  // namespace kcq
