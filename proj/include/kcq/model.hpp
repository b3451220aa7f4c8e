#pragma once

// SNAIL potential and the detuned Kerr-cat Hamiltonian
//   H = delta a^dag a + eps2 (a^dag^2 + a^2) - K a^dag^2 a^2
// in units where the Kerr coefficient is usually 1.

#include <vector>

#include "kcq/fock.hpp"

namespace kcq {

struct SnailParams {
  double E_J = 1.0;
  double beta = 0.1;
  double phi_ext = 0.0;
};

struct SnailTaylor {
  double phi_min = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;
};

/// -beta E_J cos(phi) - 3 E_J cos((phi_ext - phi) / 3).
double snail_potential(double phi, const SnailParams& p);
/// k-th derivative of the potential with respect to phi, k in 0..4.
double snail_derivative(double phi, const SnailParams& p, int order);
/// Local minimum in [-pi, pi] and Taylor coefficients g_k = U^(k)(phi_min) / k!.
SnailTaylor snail_taylor(const SnailParams& p);

struct KerrCatParams {
  double delta = 0.0;
  double eps2 = 0.0;
  double kerr = 1.0;
  int dim = 0;  // 0 selects default_dim(mean photon number)
};

/// (eps2 + delta/2) / K; throws when negative.
double mean_photon(const KerrCatParams& p);
/// Truncation actually used for p.
int resolved_dim(const KerrCatParams& p);

/// Ladder-operator building blocks of the Hamiltonian, built once per dim so
/// time-dependent drives only pay for a linear combination.
struct KerrCatOperators {
  explicit KerrCatOperators(int dim);
  int dim;
  FockOperator a, ad, n, a2, ad2, kerr_term;
  /// delta n + eps2 a^dag^2 + eps2^* a^2 - kerr a^dag^2 a^2.
  FockOperator hamiltonian(double delta, cplx eps2, double kerr) const;
};

FockOperator build_hamiltonian(const KerrCatParams& p);

struct DisplacedCoeffs {
  double E = 0.0;
  cplx Lambda;
  double delta_tilde = 0.0;
  cplx eps2_tilde;
  cplx Gamma;
};

/// Coefficients of the Hamiltonian after the displacement a -> a + alpha:
///   E = delta|a|^2 - K|a|^4 + eps2 (a^2 + a*^2)
///   Lambda = -delta a + 2K|a|^2 a* - 2 eps2 a*
///   delta~ = delta - 4K|a|^2,  eps2~ = eps2 - K a^2,  Gamma = -2K a
DisplacedCoeffs displaced_coeffs(const KerrCatParams& p, cplx alpha);

/// D^dag(alpha) H D(alpha) assembled term by term on the truncated space:
///   E + (c1 a^dag + h.c.) + delta~ n + (eps2~ a^dag^2 + h.c.)
///   + (Gamma a^dag^2 a + h.c.) - K a^dag^2 a^2.
/// The single-photon coefficient c1 = delta a + 2 eps2 a* - 2K|a|^2 a comes
/// from the expansion itself; it vanishes together with Lambda at the
/// stationary point alpha^2 = (eps2 + delta/2)/K.
FockOperator displaced_hamiltonian(const KerrCatParams& p, cplx alpha, int dim);

/// (delta/2 + eps2)^2 / K + delta^2 K / (4 eps2 + delta)^2.
double perturbative_ground_energy(const KerrCatParams& p);

struct PerturbativeState {
  FockState displaced;  // normalized |0> - sqrt(2) delta / (4 (4 eps2 + delta)) |2>
  FockState lab;        // D^dag(alpha) applied to `displaced`
  double c2 = 0.0;      // unnormalized |2> coefficient
};
PerturbativeState perturbative_ground_state(const KerrCatParams& p);

/// Exact energy of the stabilized ground state: the largest eigenvalue of H.
double exact_ground_energy(const KerrCatParams& p);

struct SpectrumRow {
  double delta = 0.0;
  std::vector<double> levels;     // descending, levels[0] is the cat ground state
  std::vector<double> pair_gaps;  // levels[2j] - levels[2j+1]
  double ground_splitting = 0.0;  // pair_gaps[0]
  std::vector<int> degenerate_pairs;  // excited pairs j >= 1 with gap < threshold
};

struct SpectrumOptions {
  int levels = 8;
  double threshold = 1e-2;  // in units of K
  int dim = 0;
  int threads = 1;
};

std::vector<SpectrumRow> spectrum_vs_detuning(double eps2, double kerr, const std::vector<double>& delta_grid,
                                              const SpectrumOptions& opt = {});

/// The encoded qubit. Basis vectors are ordered (|0_L>, |1_L>) with |0_L>
/// localized in the +alpha well; |+/-X> are the parity eigenstates of the
/// ground doublet.
struct CatFrame {
  int dim = 0;
  cplx alpha;
  FockState even, odd;   // ground doublet, parity resolved, phases fixed
  CMatrix basis;         // dim x 2, columns |0_L>, |1_L>
  FockOperator logical_X, logical_Y, logical_Z, projector;
  double doublet_splitting = 0.0;  // E_even - E_odd
  double third_gap = 0.0;          // lower doublet level minus third level

  /// Codespace coordinates (2-vector) of a Fock state.
  CVector to_logical(const FockState& psi) const { return basis.adjoint() * psi; }
  FockState from_logical(const CVector& c) const { return basis * c; }
};

/// Builds the frame from the two highest eigenstates of H. Throws
/// InvalidArgument when the doublet is not separated from the next level by
/// at least K.
CatFrame cat_frame(const KerrCatParams& p);

/// 1 - |<-alpha|phi>|^2 maximized over phi in the ground doublet, i.e. the
/// weight of |-alpha> outside the codespace.
double coherent_state_difference(const KerrCatParams& p);

}  // namespace kcq
