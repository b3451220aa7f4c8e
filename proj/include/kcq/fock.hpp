#pragma once

// Dense linear algebra on a truncated oscillator Hilbert space.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace kcq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Ket on the truncated Fock space {|0>, ..., |dim-1>}.
using FockState = CVector;
/// Dense operator on the truncated Fock space.
using FockOperator = CMatrix;

/// Truncation that keeps the coherent-state tail mass of |alpha|^2 = n below
/// 1e-10 for n <= 12: ceil(n + 6 sqrt(n + 1) + 10).
int default_dim(double mean_photon);

FockOperator annihilation_op(int dim);
FockOperator creation_op(int dim);
FockOperator number_op(int dim);
FockOperator identity_op(int dim);
/// Parity exp(i pi a^dag a) = diag(+1, -1, +1, ...).
FockOperator parity_op(int dim);

/// exp(alpha a^dag - alpha^* a) on the truncated space. Unitary to 1e-8 as
/// long as |alpha|^2 + 5|alpha| < dim.
FockOperator displacement_op(cplx alpha, int dim);

FockState fock_basis(int n, int dim);
FockState coherent_state(cplx alpha, int dim);
/// Normalized cat (|alpha> + parity |-alpha>), parity in {+1, -1}.
FockState cat_state(cplx alpha, int parity, int dim);

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns are orthonormal eigenvectors
};

/// Eigendecomposition of a Hermitian operator. Rejects inputs whose
/// anti-Hermitian part exceeds 1e-10 * max(1, |A|).
EigenSystem eig_hermitian(const FockOperator& op);

/// exp(-i H t) for Hermitian H, via eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double t);
/// exp(A) for a general square matrix (scaling and squaring with Pade).
CMatrix expm(const CMatrix& a);

/// <a|b>.
inline cplx inner(const CVector& a, const CVector& b) { return a.dot(b); }
/// <psi|op|psi>.
inline cplx expectation(const CMatrix& op, const CVector& psi) { return psi.dot(op * psi); }
/// Tr(op rho).
inline cplx expectation_dm(const CMatrix& op, const CMatrix& rho) { return (op * rho).trace(); }

/// Relative Hermiticity defect |A - A^dag|_max / max(1, |A|_max).
double hermiticity_defect(const CMatrix& a);

}  // namespace kcq
