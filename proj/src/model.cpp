#include "kcq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kcq/errors.hpp"
#include "kcq/parallel.hpp"

namespace kcq {

double snail_potential(double phi, const SnailParams& p) {
  return -p.beta * p.E_J * std::cos(phi) - 3.0 * p.E_J * std::cos((p.phi_ext - phi) / 3.0);
}

double snail_derivative(double phi, const SnailParams& p, int order) {
  const double u = (p.phi_ext - phi) / 3.0;
  const double b = p.beta * p.E_J;
  switch (order) {
    case 0: return snail_potential(phi, p);
    case 1: return b * std::sin(phi) - p.E_J * std::sin(u);
    case 2: return b * std::cos(phi) + p.E_J / 3.0 * std::cos(u);
    case 3: return -b * std::sin(phi) + p.E_J / 9.0 * std::sin(u);
    case 4: return -b * std::cos(phi) - p.E_J / 27.0 * std::cos(u);
    default: throw InvalidArgument("snail_derivative: order must be in 0..4");
  }
}

SnailTaylor snail_taylor(const SnailParams& p) {
  if (!(p.E_J > 0.0)) throw InvalidArgument("SNAIL E_J must be positive");
  if (!(p.beta > 0.0 && p.beta < 1.0) && p.beta != 0.0) throw InvalidArgument("SNAIL beta must lie in [0, 1)");
  constexpr double pi = std::numbers::pi;
  // Coarse scan for the basin, then Newton on U'.
  constexpr int n_scan = 2001;
  double phi = -pi;
  double best = snail_potential(phi, p);
  for (int i = 1; i < n_scan; ++i) {
    const double x = -pi + 2.0 * pi * i / (n_scan - 1);
    const double v = snail_potential(x, p);
    if (v < best) {
      best = v;
      phi = x;
    }
  }
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double d2 = snail_derivative(phi, p, 2);
    if (!(d2 > 0.0)) break;
    const double step = snail_derivative(phi, p, 1) / d2;
    phi -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(phi))) {
      converged = true;
      break;
    }
  }
  if (!converged && std::abs(snail_derivative(phi, p, 1)) > 1e-12 * p.E_J)
    throw NumericFailure("snail_taylor: minimizer did not converge");
  SnailTaylor t;
  t.phi_min = phi;
  t.g2 = snail_derivative(phi, p, 2) / 2.0;
  t.g3 = snail_derivative(phi, p, 3) / 6.0;
  t.g4 = snail_derivative(phi, p, 4) / 24.0;
  if (!(t.g2 > 0.0)) throw NumericFailure("snail_taylor: stationary point is not a minimum");
  return t;
}

double mean_photon(const KerrCatParams& p) {
  if (!(p.kerr > 0.0)) throw InvalidArgument("Kerr coefficient must be positive");
  const double n = (p.eps2 + p.delta / 2.0) / p.kerr;
  if (n < 0.0) throw InvalidArgument("negative mean photon number: eps2 + delta/2 < 0");
  return n;
}

int resolved_dim(const KerrCatParams& p) {
  if (p.dim > 0) {
    if (p.dim < 2) throw InvalidArgument("Fock dimension must be >= 2");
    return p.dim;
  }
  return default_dim(mean_photon(p));
}

KerrCatOperators::KerrCatOperators(int d) : dim(d) {
  a = annihilation_op(d);
  ad = a.adjoint();
  n = ad * a;
  a2 = a * a;
  ad2 = ad * ad;
  kerr_term = ad2 * a2;
}

FockOperator KerrCatOperators::hamiltonian(double delta, cplx eps2, double kerr) const {
  return delta * n + eps2 * ad2 + std::conj(eps2) * a2 - kerr * kerr_term;
}

FockOperator build_hamiltonian(const KerrCatParams& p) {
  if (!(p.kerr > 0.0)) throw InvalidArgument("Kerr coefficient must be positive");
  return KerrCatOperators(resolved_dim(p)).hamiltonian(p.delta, p.eps2, p.kerr);
}

DisplacedCoeffs displaced_coeffs(const KerrCatParams& p, cplx alpha) {
  const double K = p.kerr;
  const double n = std::norm(alpha);
  const cplx ac = std::conj(alpha);
  DisplacedCoeffs c;
  c.E = p.delta * n - K * n * n + p.eps2 * (alpha * alpha + ac * ac).real();
  c.Lambda = -p.delta * alpha + 2.0 * K * n * ac - 2.0 * p.eps2 * ac;
  c.delta_tilde = p.delta - 4.0 * K * n;
  c.eps2_tilde = p.eps2 - K * alpha * alpha;
  c.Gamma = -2.0 * K * alpha;
  return c;
}

FockOperator displaced_hamiltonian(const KerrCatParams& p, cplx alpha, int dim) {
  const KerrCatOperators o(dim);
  const DisplacedCoeffs c = displaced_coeffs(p, alpha);
  const cplx c1 = p.delta * alpha + 2.0 * p.eps2 * std::conj(alpha) - 2.0 * p.kerr * std::norm(alpha) * alpha;
  const FockOperator ad2a = o.ad2 * o.a;
  FockOperator h = c.E * FockOperator::Identity(dim, dim);
  h += c1 * o.ad + std::conj(c1) * o.a;
  h += c.delta_tilde * o.n;
  h += c.eps2_tilde * o.ad2 + std::conj(c.eps2_tilde) * o.a2;
  h += c.Gamma * ad2a + std::conj(c.Gamma) * FockOperator(ad2a.adjoint());
  h -= p.kerr * o.kerr_term;
  return h;
}

namespace {

void require_regular(const KerrCatParams& p) {
  if (!(p.kerr > 0.0)) throw InvalidArgument("Kerr coefficient must be positive");
  if (4.0 * p.eps2 + p.delta == 0.0) throw InvalidArgument("perturbation theory is singular at 4 eps2 + delta = 0");
}

}  // namespace

double perturbative_ground_energy(const KerrCatParams& p) {
  require_regular(p);
  const double s = p.delta / 2.0 + p.eps2;
  const double q = 4.0 * p.eps2 + p.delta;
  return s * s / p.kerr + p.delta * p.delta * p.kerr / (q * q);
}

PerturbativeState perturbative_ground_state(const KerrCatParams& p) {
  require_regular(p);
  const int dim = resolved_dim(p);
  PerturbativeState s;
  s.c2 = -std::sqrt(2.0) * p.delta / (4.0 * (4.0 * p.eps2 + p.delta));
  s.displaced = FockState::Zero(dim);
  s.displaced(0) = 1.0;
  s.displaced(2) = s.c2;
  s.displaced /= s.displaced.norm();
  const double alpha = std::sqrt(mean_photon(p));
  s.lab = displacement_op(-alpha, dim) * s.displaced;
  return s;
}

double exact_ground_energy(const KerrCatParams& p) {
  const EigenSystem es = eig_hermitian(build_hamiltonian(p));
  return es.values(es.values.size() - 1);
}

std::vector<SpectrumRow> spectrum_vs_detuning(double eps2, double kerr, const std::vector<double>& delta_grid,
                                              const SpectrumOptions& opt) {
  if (opt.levels < 2) throw InvalidArgument("spectrum needs at least two levels");
  for (double d : delta_grid)
    if (!std::isfinite(d)) throw InvalidArgument("detuning grid must be finite");
  std::vector<SpectrumRow> rows(delta_grid.size());
  parallel_for(delta_grid.size(), opt.threads, [&](std::size_t i) {
    KerrCatParams p{delta_grid[i], eps2, kerr, opt.dim};
    if (opt.dim <= 0) p.dim = default_dim(std::max(0.0, (eps2 + delta_grid[i] / 2.0) / kerr)) + 10;
    const EigenSystem es = eig_hermitian(build_hamiltonian(p));
    SpectrumRow row;
    row.delta = delta_grid[i];
    const int m = std::min<int>(opt.levels, static_cast<int>(es.values.size()));
    for (int k = 0; k < m; ++k) row.levels.push_back(es.values(es.values.size() - 1 - k));
    for (int j = 0; 2 * j + 1 < m; ++j) {
      const double gap = row.levels[2 * j] - row.levels[2 * j + 1];
      row.pair_gaps.push_back(gap);
      if (j >= 1 && std::abs(gap) < opt.threshold * kerr) row.degenerate_pairs.push_back(j);
    }
    row.ground_splitting = row.pair_gaps.empty() ? 0.0 : row.pair_gaps[0];
    rows[i] = std::move(row);
  });
  return rows;
}

CatFrame cat_frame(const KerrCatParams& p) {
  const int dim = resolved_dim(p);
  KerrCatParams q = p;
  q.dim = dim;
  const double nbar = mean_photon(q);
  const EigenSystem es = eig_hermitian(build_hamiltonian(q));
  const int top = static_cast<int>(es.values.size()) - 1;
  if (top < 2) throw InvalidArgument("cat_frame needs dim >= 3");

  CatFrame f;
  f.dim = dim;
  f.alpha = std::sqrt(nbar);
  f.third_gap = es.values(top - 1) - es.values(top - 2);
  if (f.third_gap < p.kerr)
    throw InvalidArgument("ill-defined codespace: ground doublet is within K of the next level (gap " +
                          std::to_string(f.third_gap) + ")");

  // Resolve parity inside the doublet; this removes any mixing left by
  // (near-)degenerate eigenvectors.
  CMatrix pair(dim, 2);
  pair.col(0) = es.vectors.col(top);
  pair.col(1) = es.vectors.col(top - 1);
  const CMatrix par = pair.adjoint() * parity_op(dim) * pair;
  Eigen::SelfAdjointEigenSolver<CMatrix> ps(0.5 * (par + par.adjoint()));
  f.odd = pair * ps.eigenvectors().col(0);
  f.even = pair * ps.eigenvectors().col(1);
  const CMatrix hp = pair.adjoint() * build_hamiltonian(q) * pair;
  const cplx e_even = ps.eigenvectors().col(1).dot(hp * ps.eigenvectors().col(1));
  const cplx e_odd = ps.eigenvectors().col(0).dot(hp * ps.eigenvectors().col(0));
  f.doublet_splitting = (e_even - e_odd).real();

  // Phase convention: <C_alpha^+|even> and <C_alpha^-|odd> real positive.
  auto fix_phase = [](FockState& v, const FockState& ref) {
    const cplx ov = ref.dot(v);
    if (std::abs(ov) < 1e-12) throw NumericFailure("cat_frame: doublet state orthogonal to reference cat");
    v *= std::conj(ov) / std::abs(ov);
  };
  fix_phase(f.even, cat_state(f.alpha, +1, dim));
  fix_phase(f.odd, cat_state(f.alpha, -1, dim));

  f.basis.resize(dim, 2);
  f.basis.col(0) = (f.even + f.odd) / std::sqrt(2.0);
  f.basis.col(1) = (f.even - f.odd) / std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd z, x, y;
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  y << 0, -I, I, 0;
  f.logical_Z = f.basis * z * f.basis.adjoint();
  f.logical_X = f.basis * x * f.basis.adjoint();
  f.logical_Y = f.basis * y * f.basis.adjoint();
  f.projector = f.basis * f.basis.adjoint();
  return f;
}

double coherent_state_difference(const KerrCatParams& p) {
  const CatFrame f = cat_frame(p);
  const FockState minus = coherent_state(-f.alpha, f.dim);
  return 1.0 - f.to_logical(minus).squaredNorm();
}

}  // namespace kcq
