#pragma once

// Schrödinger and Lindblad time evolution, the thermal noise model and the
// lifetime experiments built on them.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kcq/fitting.hpp"
#include "kcq/fock.hpp"
#include "kcq/model.hpp"

namespace kcq {

struct NoiseParams {
  double kappa1 = 0.0;     // single-photon loss 1/T1
  double n_th = 0.0;       // thermal population
  double kappa2 = 0.0;     // two-photon process scale
  double kappa_phi = 0.0;  // dephasing
  double xi = 0.0;         // std. dev. of quasi-static detuning noise

  /// Throws InvalidArgument unless all fields are >= 0 and n_th < 0.5.
  void validate() const;
};

struct CollapseOp {
  std::string name;
  FockOperator op;
  double rate = 0.0;
};

/// {a: k1(1+n), a^dag: k1 n, a^2: k2(1+n)^2, a^dag^2: k2 n^2, a^dag a: k_phi}.
std::vector<CollapseOp> standard_collapse_set(const NoiseParams& np, int dim);

using DensityMatrix = CMatrix;

struct DensityCheck {
  double hermiticity = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;  // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};
DensityCheck check_density(const DensityMatrix& rho);

/// Named real time series sampled on a common grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // values[k] belongs to names[k]

  std::vector<double>& add(const std::string& name);
  const std::vector<double>& series(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// (name, operator); trajectories record Re <operator>.
using Observable = std::pair<std::string, FockOperator>;
using HamiltonianFn = std::function<FockOperator(double)>;

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 picks a step from the initial derivative
  double h_min = 1e-12;
  long max_steps = 20'000'000;
};

/// Adaptive Dormand-Prince 5(4) integration of dY/dt = f(t, Y) for a complex
/// matrix state. Steps are shortened to land exactly on every grid time;
/// `on_grid(i, Y)` is called for each t_grid[i] (including t_grid[0]).
void integrate(const std::function<void(double, const CMatrix&, CMatrix&)>& f, CMatrix& y,
               const std::vector<double>& t_grid, const std::function<void(std::size_t, const CMatrix&)>& on_grid,
               const OdeOptions& opt = {});

struct KetEvolution {
  Trajectory traj;
  FockState state;
};

KetEvolution schrodinger_evolve(const HamiltonianFn& h, const FockState& psi0, const std::vector<double>& t_grid,
                                const std::vector<Observable>& observables = {}, const OdeOptions& opt = {});

/// Evolves every column of `kets` from t0 to t1 under the same H(t).
CMatrix evolve_kets(const HamiltonianFn& h, const CMatrix& kets, double t0, double t1, const OdeOptions& opt = {});

struct DensityEvolution {
  Trajectory traj;
  DensityMatrix state;
};

DensityEvolution lindblad_evolve(const HamiltonianFn& h, const std::vector<CollapseOp>& collapse,
                                 const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                 const std::vector<Observable>& observables = {}, const OdeOptions& opt = {});

/// Lindblad generator for a time-independent problem restricted to the span
/// of the `levels` highest eigenstates of H (the cat ground doublet and the
/// states just below it). Propagation uses the exact exponential of the
/// generator, so long idling windows cost no more than short ones.
class StaticLindblad {
 public:
  StaticLindblad(const FockOperator& h, const std::vector<CollapseOp>& collapse, int levels);

  int levels() const { return levels_; }
  /// dim x levels, columns are the retained eigenstates (highest first).
  const CMatrix& basis() const { return basis_; }
  /// Column-stacked generator of size levels^2.
  const CMatrix& generator() const { return generator_; }

  CMatrix reduce(const CMatrix& op) const { return basis_.adjoint() * op * basis_; }
  DensityMatrix reduce_state(const FockState& psi) const;
  DensityMatrix expand(const DensityMatrix& reduced) const { return basis_ * reduced * basis_.adjoint(); }

  /// Reduced states at each grid time; t_grid ascending with t_grid[0] the
  /// time of `rho0`.
  std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const std::vector<double>& t_grid) const;

  /// Smallest nonzero relaxation rate of the generator (its spectral gap).
  double slowest_rate() const;

 private:
  int levels_;
  CMatrix basis_;
  CMatrix generator_;
};

/// Averages sim(delta_shift, sample_seed) over delta_shift ~ Normal(0, xi).
/// Samples are keyed by (seed, index) and reduced in index order, so the
/// result does not depend on `threads`. xi = 0 returns sim(0, seed) exactly.
Trajectory quasi_static_average(const std::function<Trajectory(double, std::uint64_t)>& sim, double xi,
                                int n_samples, std::uint64_t seed, int threads = 1);

struct LifetimeOptions {
  int levels = 16;      // retained eigenstates in the static engine
  int n_points = 81;    // samples on [0, t_max]
  int n_samples = 64;   // quasi-static detuning samples (used when xi > 0)
  int threads = 1;
};

struct LifetimeResult {
  DecayFit fit;
  Trajectory traj;
  double t_max = 0.0;
};

/// Sign of the position quadrature, sign(x) with x = (a + a^dag)/sqrt(2):
/// +1 in the +alpha well, -1 in the -alpha well.
FockOperator well_sign_op(int dim);

/// T_z: prepares the +alpha well state projected on the ground doublet,
/// idles under the standard collapse set and fits the decay of the
/// well-sign observable. t_max <= 0 selects three slowest-mode lifetimes.
LifetimeResult bit_flip_time(const KerrCatParams& p, const NoiseParams& np, double t_max, std::uint64_t seed,
                             const LifetimeOptions& opt = {});

/// T_y: prepares logical +Y and fits the decay of <Y>. t_max <= 0 selects
/// three times T1 / (2 <n>).
LifetimeResult phase_flip_time(const KerrCatParams& p, const NoiseParams& np, double t_max, std::uint64_t seed = 0,
                               const LifetimeOptions& opt = {});

struct InitOptions {
  int ramp_points = 41;
  int relax_points = 41;
  int levels = 20;
  double steepness = 3.0;  // tanh ramp sharpness
  OdeOptions ode{};
};

/// Smooth ramp 0 -> 1 over [0, T]: (tanh(s(2t/T - 1)) + tanh s) / (2 tanh s).
double tanh_ramp(double t, double ramp_time, double steepness);

/// Starts in vacuum, ramps eps2 from 0 under the closed-system Hamiltonian,
/// then idles for relax_time under the full Lindblad model. Records
/// p_plus = |<C+|psi>|^2, p_minus, and leakage = 1 - p_plus - p_minus. During
/// the ramp the cats are taken at the instantaneous alpha; during relaxation
/// they are the leading even and odd eigenvectors of the Lindblad steady state.
Trajectory initialization_sim(const KerrCatParams& p, const NoiseParams& np, double ramp_time, double relax_time,
                              const InitOptions& opt = {});

}  // namespace kcq
