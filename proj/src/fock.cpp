#include "kcq/fock.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "kcq/errors.hpp"

namespace kcq {

namespace {

void require_dim(int dim) {
  if (dim < 2) throw InvalidArgument("Fock dimension must be >= 2, got " + std::to_string(dim));
}

}  // namespace

int default_dim(double mean_photon) {
  if (!(mean_photon >= 0.0)) throw InvalidArgument("mean photon number must be >= 0");
  return static_cast<int>(std::ceil(mean_photon + 6.0 * std::sqrt(mean_photon + 1.0) + 10.0));
}

FockOperator annihilation_op(int dim) {
  require_dim(dim);
  FockOperator a = FockOperator::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

FockOperator creation_op(int dim) { return annihilation_op(dim).adjoint(); }

FockOperator number_op(int dim) {
  require_dim(dim);
  FockOperator n = FockOperator::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

FockOperator identity_op(int dim) {
  require_dim(dim);
  return FockOperator::Identity(dim, dim);
}

FockOperator parity_op(int dim) {
  require_dim(dim);
  FockOperator p = FockOperator::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

FockOperator displacement_op(cplx alpha, int dim) {
  const FockOperator a = annihilation_op(dim);
  // alpha a^dag - alpha^* a is anti-Hermitian; i times it is Hermitian.
  const CMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
  return expm_hermitian(cplx(0.0, 1.0) * generator, 1.0);
}

FockState fock_basis(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) throw InvalidArgument("Fock index out of range");
  FockState s = FockState::Zero(dim);
  s(n) = 1.0;
  return s;
}

FockState coherent_state(cplx alpha, int dim) {
  require_dim(dim);
  FockState s(dim);
  // c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) by recurrence.
  s(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) s(n) = s(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return s / s.norm();
}

FockState cat_state(cplx alpha, int parity, int dim) {
  if (parity != 1 && parity != -1) throw InvalidArgument("cat parity must be +1 or -1");
  FockState s = coherent_state(alpha, dim) + static_cast<double>(parity) * coherent_state(-alpha, dim);
  const double norm = s.norm();
  if (norm < 1e-12) throw InvalidArgument("cat state is the zero vector (odd cat at alpha = 0)");
  return s / norm;
}

double hermiticity_defect(const CMatrix& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

EigenSystem eig_hermitian(const FockOperator& op) {
  if (op.rows() != op.cols() || op.rows() < 1) throw InvalidArgument("eig_hermitian needs a square matrix");
  if (hermiticity_defect(op) > 1e-10) throw InvalidArgument("eig_hermitian: operator is not Hermitian");
  const CMatrix sym = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericFailure("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
  const EigenSystem es = eig_hermitian(h);
  CVector phases(es.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(cplx(0.0, -es.values(k) * t));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

CMatrix expm(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm needs a square matrix");
  return a.exp();
}

}  // namespace kcq
