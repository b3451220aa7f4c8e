#pragma once

// Single-qubit Pauli transfer matrices in the basis order (I, X, Y, Z) and
// the error-generator algebra around them.

#include <array>

#include <Eigen/Dense>

namespace kcq {

using Ptm = Eigen::Matrix4d;

/// L = sum_m h_m H_m + sum_m p_m P_m, m in (x, y, z).
struct ErrorGenerator {
  std::array<double, 3> h{};
  std::array<double, 3> p{};
};

/// H_x, H_y, H_z, P_x, P_y, P_z in that order.
std::array<Eigen::Matrix4d, 6> generator_matrices();

Eigen::Matrix4d build_error_generator(const ErrorGenerator& g);

Ptm ptm_exp(const Eigen::Matrix4d& l);
/// Principal logarithm. Throws AmbiguousLog when an eigenvalue sits on or
/// near the negative real axis (rotation angle close to pi), and
/// NumericFailure for singular input.
Eigen::Matrix4d ptm_log(const Ptm& e);

struct GeneratorFit {
  ErrorGenerator g;
  double residual = 0.0;  // Frobenius norm of the part outside the span
};
/// Least-squares projection of L onto the six generators.
GeneratorFit decompose_generator(const Eigen::Matrix4d& l);

/// PTMs of I, X, Y, Z.
std::array<Ptm, 4> pauli_ptms();
/// exp(theta H_axis): a rotation by theta about axis 'x', 'y' or 'z'.
Ptm rotation_ptm(char axis, double theta);
/// PTM of a 2x2 unitary, R_ij = Tr(P_i U P_j U^dag) / 2.
Ptm unitary_ptm(const Eigen::Matrix2cd& u);

/// (1/4) sum_P R_P e R_P.
Ptm pauli_twirl(const Ptm& e);
/// Average of R_g^T e R_g over the 16 elements Z(k pi/4) X^b.
Ptm dihedral_twirl(const Ptm& e);

/// Stochastic Pauli probabilities (p_x, p_y, p_z) of the diagonal of e.
std::array<double, 3> pauli_probabilities(const Ptm& e);

/// Pauli-twirled generator: h -> 0 and p'_m = p_m + h_m^2 / 4.
ErrorGenerator pauli_reduced(const ErrorGenerator& g);

/// p'_x + p'_y + p'_z.
double pauli_channel_infidelity(const ErrorGenerator& g);

/// Tr(ideal^-1 ptm) / 4 clamped to [0, 1]. Throws for a singular ideal.
double process_fidelity(const Ptm& ptm, const Ptm& ideal);

}  // namespace kcq
