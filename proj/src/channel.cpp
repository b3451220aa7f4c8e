#include "kcq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "kcq/errors.hpp"

namespace kcq {

using Eigen::Matrix4d;

std::array<Matrix4d, 6> generator_matrices() {
  std::array<Matrix4d, 6> g;
  for (auto& m : g) m.setZero();
  g[0](2, 3) = -1;
  g[0](3, 2) = 1;
  g[1](1, 3) = 1;
  g[1](3, 1) = -1;
  g[2](1, 2) = -1;
  g[2](2, 1) = 1;
  g[3].diagonal() << 0, 0, -2, -2;
  g[4].diagonal() << 0, -2, 0, -2;
  g[5].diagonal() << 0, -2, -2, 0;
  return g;
}

Matrix4d build_error_generator(const ErrorGenerator& g) {
  const auto basis = generator_matrices();
  Matrix4d l = Matrix4d::Zero();
  for (int m = 0; m < 3; ++m) {
    l += g.h[m] * basis[m];
    l += g.p[m] * basis[3 + m];
  }
  return l;
}

Ptm ptm_exp(const Matrix4d& l) { return l.exp(); }

Matrix4d ptm_log(const Ptm& e) {
  Eigen::EigenSolver<Matrix4d> es(e, false);
  if (es.info() != Eigen::Success) throw NumericFailure("ptm_log: eigensolver failed");
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z) < 1e-12) throw NumericFailure("ptm_log: singular transfer matrix");
    if (std::abs(std::arg(z)) > std::numbers::pi - 1e-6)
      throw AmbiguousLog("ptm_log: eigenvalue on the negative real axis, branch is ambiguous");
  }
  return e.log();
}

GeneratorFit decompose_generator(const Matrix4d& l) {
  const auto basis = generator_matrices();
  Eigen::Matrix<double, 16, 6> a;
  for (int k = 0; k < 6; ++k) a.col(k) = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(basis[k].data());
  const Eigen::Matrix<double, 16, 1> b = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(l.data());
  const Eigen::Matrix<double, 6, 1> c = a.colPivHouseholderQr().solve(b);
  GeneratorFit out;
  for (int m = 0; m < 3; ++m) {
    out.g.h[m] = c(m);
    out.g.p[m] = c(3 + m);
  }
  out.residual = (a * c - b).norm();
  return out;
}

std::array<Ptm, 4> pauli_ptms() {
  std::array<Ptm, 4> r;
  r[0] = Ptm::Identity();
  r[1] = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  r[2] = Eigen::Vector4d(1, -1, 1, -1).asDiagonal();
  r[3] = Eigen::Vector4d(1, -1, -1, 1).asDiagonal();
  return r;
}

Ptm rotation_ptm(char axis, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Ptm r = Ptm::Identity();
  int i = 0, j = 0;  // rotation plane, sign fixed by exp(theta H_axis)
  switch (axis) {
    case 'x': i = 2; j = 3; break;
    case 'y': i = 3; j = 1; break;
    case 'z': i = 1; j = 2; break;
    default: throw InvalidArgument("rotation axis must be x, y or z");
  }
  r(i, i) = c;
  r(j, j) = c;
  r(i, j) = -s;
  r(j, i) = s;
  return r;
}

Ptm unitary_ptm(const Eigen::Matrix2cd& u) {
  using C = std::complex<double>;
  std::array<Eigen::Matrix2cd, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, C(0, -1), C(0, 1), 0;
  p[3] << 1, 0, 0, -1;
  Ptm r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = 0.5 * (p[i] * u * p[j] * u.adjoint()).trace().real();
  return r;
}

Ptm pauli_twirl(const Ptm& e) {
  Ptm acc = Ptm::Zero();
  for (const auto& r : pauli_ptms()) acc += r * e * r;
  return acc / 4.0;
}

Ptm dihedral_twirl(const Ptm& e) {
  const Ptm x = pauli_ptms()[1];
  Ptm acc = Ptm::Zero();
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < 8; ++k) {
      Ptm g = rotation_ptm('z', k * std::numbers::pi / 4.0);
      if (b) g = g * x;
      acc += g.transpose() * e * g;
    }
  return acc / 16.0;
}

std::array<double, 3> pauli_probabilities(const Ptm& e) {
  const double lx = e(1, 1), ly = e(2, 2), lz = e(3, 3);
  return {(1.0 + lx - ly - lz) / 4.0, (1.0 - lx + ly - lz) / 4.0, (1.0 - lx - ly + lz) / 4.0};
}

ErrorGenerator pauli_reduced(const ErrorGenerator& g) {
  ErrorGenerator out;
  for (int m = 0; m < 3; ++m) out.p[m] = g.p[m] + 0.25 * g.h[m] * g.h[m];
  return out;
}

double pauli_channel_infidelity(const ErrorGenerator& g) {
  const ErrorGenerator r = pauli_reduced(g);
  return r.p[0] + r.p[1] + r.p[2];
}

double process_fidelity(const Ptm& ptm, const Ptm& ideal) {
  Eigen::FullPivLU<Ptm> lu(ideal);
  if (!lu.isInvertible()) throw InvalidArgument("process_fidelity: ideal channel is not invertible");
  const double f = (lu.inverse() * ptm).trace() / 4.0;
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace kcq
