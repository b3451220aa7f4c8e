#include "kcq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "kcq/errors.hpp"
#include "kcq/parallel.hpp"
#include "kcq/rng.hpp"

namespace kcq {

void NoiseParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"kappa1", kappa1}, {"n_th", n_th}, {"kappa2", kappa2}, {"kappa_phi", kappa_phi}, {"xi", xi}};
  for (const auto& [name, v] : fields)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("noise parameter ") + name + " must be >= 0");
  if (!(n_th < 0.5)) throw InvalidArgument("n_th must be below 0.5");
}

std::vector<CollapseOp> standard_collapse_set(const NoiseParams& np, int dim) {
  np.validate();
  const FockOperator a = annihilation_op(dim);
  const FockOperator ad = a.adjoint();
  const double up = 1.0 + np.n_th;
  return {
      {"a", a, np.kappa1 * up},
      {"a_dag", ad, np.kappa1 * np.n_th},
      {"a2", a * a, np.kappa2 * up * up},
      {"a_dag2", ad * ad, np.kappa2 * np.n_th * np.n_th},
      {"n", ad * a, np.kappa_phi},
  };
}

DensityCheck check_density(const DensityMatrix& rho) {
  DensityCheck c;
  c.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho.trace() - 1.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues()(0);
  return c;
}

std::vector<double>& Trajectory::add(const std::string& name) {
  names.push_back(name);
  values.emplace_back();
  return values.back();
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k];
  throw InvalidArgument("trajectory has no series named " + name);
}

bool Trajectory::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] >= t_grid[i - 1])) throw InvalidArgument("time grid must be ascending");
}

double error_norm(const CMatrix& err, const CMatrix& y0, const CMatrix& y1, double atol, double rtol) {
  // Max norm: every component must meet its own tolerance.
  double worst = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    worst = std::max(worst, std::abs(err.data()[i]) / sc);
  }
  return worst;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void integrate(const std::function<void(double, const CMatrix&, CMatrix&)>& f, CMatrix& y,
               const std::vector<double>& t_grid, const std::function<void(std::size_t, const CMatrix&)>& on_grid,
               const OdeOptions& opt) {
  check_grid(t_grid);
  if (on_grid) on_grid(0, y);
  if (t_grid.size() == 1) return;

  const Eigen::Index rows = y.rows(), cols = y.cols();
  CMatrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols), k6(rows, cols),
      k7(rows, cols), ytmp(rows, cols), ynew(rows, cols);
  double t = t_grid.front();
  f(t, y, k1);

  double h = opt.h_init;
  if (!(h > 0.0)) {
    const double fy = k1.norm();
    const double yn = std::max(y.norm(), 1e-12);
    h = fy > 0.0 ? 0.01 * yn / fy : 1e-2;
    h = std::min(h, std::max(t_grid.back() - t, 1e-12));
  }
  long steps = 0;
  for (std::size_t next = 1; next < t_grid.size(); ++next) {
    const double target = t_grid[next];
    while (t < target) {
      if (++steps > opt.max_steps) throw NumericFailure("integrator exceeded the maximum number of steps");
      const bool clipped = t + h >= target;
      const double hs = clipped ? target - t : h;
      ytmp = y + hs * a21 * k1;
      f(t + c2 * hs, ytmp, k2);
      ytmp = y + hs * (a31 * k1 + a32 * k2);
      f(t + c3 * hs, ytmp, k3);
      ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * hs, ytmp, k4);
      ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * hs, ytmp, k5);
      ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + hs, ytmp, k6);
      ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double t_new = clipped ? target : t + hs;
      f(t_new, ynew, k7);
      ytmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = error_norm(ytmp, y, ynew, opt.atol, opt.rtol);
      if (!std::isfinite(err)) throw NumericFailure("integrator produced a non-finite state");
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = t_new;
        y.swap(ynew);
        k1.swap(k7);
        // A step shortened to hit the grid says nothing about the natural
        // step size, so only grow h from unclipped steps.
        if (!clipped || hs * factor < h) h = hs * factor;
      } else {
        h = hs * std::max(0.2, factor);
      }
      if (h < opt.h_min * std::max(1.0, std::abs(t))) throw NumericFailure("integrator step size underflow");
    }
    if (on_grid) on_grid(next, y);
  }
}

KetEvolution schrodinger_evolve(const HamiltonianFn& h, const FockState& psi0, const std::vector<double>& t_grid,
                                const std::vector<Observable>& observables, const OdeOptions& opt) {
  KetEvolution out;
  out.traj.times = t_grid;
  for (const auto& o : observables) out.traj.add(o.first);
  out.traj.add("norm");
  const cplx mi(0.0, -1.0);
  CMatrix y = psi0;
  integrate([&](double t, const CMatrix& s, CMatrix& ds) { ds.noalias() = mi * (h(t) * s); }, y, t_grid,
            [&](std::size_t, const CMatrix& s) {
              const FockState v = s.col(0);
              for (std::size_t k = 0; k < observables.size(); ++k)
                out.traj.values[k].push_back(expectation(observables[k].second, v).real());
              out.traj.values.back().push_back(v.norm());
            },
            opt);
  out.state = y.col(0);
  return out;
}

CMatrix evolve_kets(const HamiltonianFn& h, const CMatrix& kets, double t0, double t1, const OdeOptions& opt) {
  CMatrix y = kets;
  const cplx mi(0.0, -1.0);
  integrate([&](double t, const CMatrix& s, CMatrix& ds) { ds.noalias() = mi * (h(t) * s); }, y, {t0, t1}, nullptr,
            opt);
  return y;
}

DensityEvolution lindblad_evolve(const HamiltonianFn& h, const std::vector<CollapseOp>& collapse,
                                 const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                 const std::vector<Observable>& observables, const OdeOptions& opt) {
  const Eigen::Index dim = rho0.rows();
  std::vector<std::pair<double, FockOperator>> jumps;
  CMatrix damping = CMatrix::Zero(dim, dim);
  for (const auto& c : collapse) {
    if (c.rate < 0.0) throw InvalidArgument("collapse rate must be >= 0");
    if (c.rate == 0.0) continue;
    jumps.emplace_back(c.rate, c.op);
    damping += c.rate * (c.op.adjoint() * c.op);
  }
  const cplx mi(0.0, -1.0);
  CMatrix heff(dim, dim), tmp(dim, dim);
  auto rhs = [&](double t, const CMatrix& rho, CMatrix& drho) {
    heff = h(t) - cplx(0.0, 0.5) * damping;
    tmp.noalias() = heff * rho;
    drho = mi * tmp;
    drho.noalias() -= mi * (rho * heff.adjoint());
    for (const auto& [rate, op] : jumps) {
      tmp.noalias() = op * rho;
      drho.noalias() += rate * (tmp * op.adjoint());
    }
  };
  DensityEvolution out;
  out.traj.times = t_grid;
  for (const auto& o : observables) out.traj.add(o.first);
  out.traj.add("trace");
  CMatrix y = rho0;
  integrate(rhs, y, t_grid,
            [&](std::size_t, const CMatrix& rho) {
              for (std::size_t k = 0; k < observables.size(); ++k)
                out.traj.values[k].push_back(expectation_dm(observables[k].second, rho).real());
              out.traj.values.back().push_back(rho.trace().real());
            },
            opt);
  out.state = y;
  return out;
}

StaticLindblad::StaticLindblad(const FockOperator& h, const std::vector<CollapseOp>& collapse, int levels) {
  const EigenSystem es = eig_hermitian(h);
  const int dim = static_cast<int>(es.values.size());
  if (levels < 1) throw InvalidArgument("StaticLindblad needs at least one level");
  levels_ = std::min(levels, dim);
  const int m = levels_;
  basis_.resize(dim, m);
  Eigen::VectorXd energies(m);
  for (int k = 0; k < m; ++k) {
    basis_.col(k) = es.vectors.col(dim - 1 - k);
    energies(k) = es.values(dim - 1 - k);
  }
  std::vector<std::pair<double, CMatrix>> jumps;
  CMatrix damping = CMatrix::Zero(m, m);
  for (const auto& c : collapse) {
    if (c.rate < 0.0) throw InvalidArgument("collapse rate must be >= 0");
    if (c.rate == 0.0) continue;
    CMatrix r = reduce(c.op);
    damping += c.rate * (r.adjoint() * r);
    jumps.emplace_back(c.rate, std::move(r));
  }
  CMatrix heff = energies.cast<cplx>().asDiagonal();
  heff -= cplx(0.0, 0.5) * damping;
  const cplx mi(0.0, -1.0);
  generator_.resize(m * m, m * m);
  CMatrix e = CMatrix::Zero(m, m);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      e.setZero();
      e(a, b) = 1.0;
      CMatrix out = mi * (heff * e - e * heff.adjoint());
      for (const auto& [rate, op] : jumps) out += rate * (op * e * op.adjoint());
      generator_.col(a + b * m) = Eigen::Map<const CVector>(out.data(), m * m);
    }
  }
}

DensityMatrix StaticLindblad::reduce_state(const FockState& psi) const {
  const CVector c = basis_.adjoint() * psi;
  return c * c.adjoint();
}

std::vector<DensityMatrix> StaticLindblad::evolve(const DensityMatrix& rho0, const std::vector<double>& t_grid) const {
  check_grid(t_grid);
  const int m = levels_;
  if (rho0.rows() != m || rho0.cols() != m) throw InvalidArgument("StaticLindblad::evolve: state has wrong size");
  std::vector<std::pair<double, CMatrix>> cache;
  auto propagator = [&](double dt) -> const CMatrix& {
    for (const auto& [d, p] : cache)
      if (std::abs(d - dt) <= 1e-12 * std::max(1.0, std::abs(dt))) return p;
    cache.emplace_back(dt, CMatrix((generator_ * dt).exp()));
    return cache.back().second;
  };
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  CVector v = Eigen::Map<const CVector>(rho0.data(), m * m);
  out.push_back(rho0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    if (dt > 0.0) v = propagator(dt) * v;
    DensityMatrix r = Eigen::Map<const CMatrix>(v.data(), m, m);
    out.push_back(0.5 * (r + r.adjoint()));
  }
  return out;
}

double StaticLindblad::slowest_rate() const {
  Eigen::ComplexEigenSolver<CMatrix> es(generator_, false);
  if (es.info() != Eigen::Success) throw NumericFailure("generator eigensolver failed");
  const CVector ev = es.eigenvalues();
  std::vector<double> rates;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rates.push_back(-ev(i).real());
  std::sort(rates.begin(), rates.end());
  // rates[0] is the steady state; report the next one that is clearly nonzero.
  const double scale = std::max(1e-300, rates.back());
  for (std::size_t i = 1; i < rates.size(); ++i)
    if (rates[i] > 1e-12 * scale) return rates[i];
  return 0.0;
}

Trajectory quasi_static_average(const std::function<Trajectory(double, std::uint64_t)>& sim, double xi,
                                int n_samples, std::uint64_t seed, int threads) {
  if (n_samples < 1) throw InvalidArgument("quasi_static_average needs n_samples >= 1");
  if (!(xi >= 0.0)) throw InvalidArgument("xi must be >= 0");
  if (xi == 0.0) return sim(0.0, rng::derive(seed, {0}));
  std::vector<Trajectory> runs(static_cast<std::size_t>(n_samples));
  parallel_for(runs.size(), threads, [&](std::size_t i) {
    auto gen = rng::stream(seed, {0x51, i});
    std::normal_distribution<double> normal(0.0, xi);
    const double shift = normal(gen);
    runs[i] = sim(shift, rng::derive(seed, {i}));
  });
  Trajectory avg = runs.front();
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].names != avg.names || runs[i].times.size() != avg.times.size())
      throw InvalidArgument("quasi_static_average: samples produced differently shaped trajectories");
    for (std::size_t k = 0; k < avg.values.size(); ++k)
      for (std::size_t j = 0; j < avg.values[k].size(); ++j) avg.values[k][j] += runs[i].values[k][j];
  }
  for (auto& series : avg.values)
    for (double& v : series) v /= static_cast<double>(n_samples);
  return avg;
}

FockOperator well_sign_op(int dim) {
  const FockOperator a = annihilation_op(dim);
  const EigenSystem es = eig_hermitian((a + a.adjoint()) / std::sqrt(2.0));
  CVector s(es.values.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s(i) = es.values(i) > 1e-12 ? 1.0 : (es.values(i) < -1e-12 ? -1.0 : 0.0);
  return es.vectors * s.asDiagonal() * es.vectors.adjoint();
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw InvalidArgument("need at least two grid points");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

// Idles `psi` under H(delta + shift) with the standard collapse set and
// records Re Tr(O rho) for each observable.
Trajectory idle_run(const KerrCatParams& p, const NoiseParams& np, double shift, const FockState& psi,
                    const std::vector<Observable>& obs, const std::vector<double>& times, int levels) {
  KerrCatParams q = p;
  q.delta += shift;
  const StaticLindblad engine(build_hamiltonian(q), standard_collapse_set(np, q.dim), levels);
  DensityMatrix rho0 = engine.reduce_state(psi);
  rho0 /= rho0.trace();
  std::vector<CMatrix> reduced;
  for (const auto& o : obs) reduced.push_back(engine.reduce(o.second));
  Trajectory traj;
  traj.times = times;
  for (const auto& o : obs) traj.add(o.first);
  for (const auto& rho : engine.evolve(rho0, times))
    for (std::size_t k = 0; k < obs.size(); ++k) traj.values[k].push_back((reduced[k] * rho).trace().real());
  return traj;
}

LifetimeResult run_lifetime(const KerrCatParams& p0, const NoiseParams& np, double t_max, std::uint64_t seed,
                            const LifetimeOptions& opt, const FockState& psi, const std::vector<Observable>& obs,
                            const std::string& fit_series) {
  KerrCatParams p = p0;
  p.dim = resolved_dim(p0);
  LifetimeResult res;
  res.t_max = t_max;
  const std::vector<double> times = linspace(0.0, t_max, opt.n_points);
  res.traj = quasi_static_average(
      [&](double shift, std::uint64_t) { return idle_run(p, np, shift, psi, obs, times, opt.levels); }, np.xi,
      opt.n_samples, seed, opt.threads);
  res.fit = fit_decay(res.traj.times, res.traj.series(fit_series));
  return res;
}

}  // namespace

LifetimeResult bit_flip_time(const KerrCatParams& p0, const NoiseParams& np, double t_max, std::uint64_t seed,
                             const LifetimeOptions& opt) {
  np.validate();
  KerrCatParams p = p0;
  p.dim = resolved_dim(p0);
  const CatFrame frame = cat_frame(p);
  FockState psi = frame.projector * coherent_state(frame.alpha, p.dim);
  psi /= psi.norm();
  if (!(t_max > 0.0)) {
    const StaticLindblad nominal(build_hamiltonian(p), standard_collapse_set(np, p.dim), opt.levels);
    const double rate = nominal.slowest_rate();
    t_max = rate > 0.0 ? 3.0 / rate : 100.0;
  }
  const std::vector<Observable> obs = {{"well_sign", well_sign_op(p.dim)},
                                       {"Z", frame.logical_Z},
                                       {"codespace", frame.projector}};
  LifetimeResult r = run_lifetime(p, np, t_max, seed, opt, psi, obs, "well_sign");
  for (double& v : r.traj.values[2]) v = 1.0 - v;
  r.traj.names[2] = "leakage";
  return r;
}

LifetimeResult phase_flip_time(const KerrCatParams& p0, const NoiseParams& np, double t_max, std::uint64_t seed,
                               const LifetimeOptions& opt) {
  np.validate();
  KerrCatParams p = p0;
  p.dim = resolved_dim(p0);
  const CatFrame frame = cat_frame(p);
  const FockState psi = frame.from_logical(CVector{{cplx(1.0, 0.0), cplx(0.0, 1.0)}} / std::sqrt(2.0));
  if (!(t_max > 0.0)) {
    const double rate = 2.0 * mean_photon(p) * np.kappa1 * (1.0 + 2.0 * np.n_th);
    t_max = rate > 0.0 ? 3.0 / rate : 100.0;
  }
  const std::vector<Observable> obs = {
      {"Y", frame.logical_Y}, {"X", frame.logical_X}, {"Z", frame.logical_Z}, {"codespace", frame.projector}};
  LifetimeResult r = run_lifetime(p, np, t_max, seed, opt, psi, obs, "Y");
  for (double& v : r.traj.values[3]) v = 1.0 - v;
  r.traj.names[3] = "leakage";
  return r;
}

double tanh_ramp(double t, double ramp_time, double steepness) {
  if (!(ramp_time > 0.0)) throw InvalidArgument("ramp time must be positive");
  if (!(steepness > 0.0)) throw InvalidArgument("ramp steepness must be positive");
  const double x = std::clamp(t / ramp_time, 0.0, 1.0);
  const double th = std::tanh(steepness);
  return (std::tanh(steepness * (2.0 * x - 1.0)) + th) / (2.0 * th);
}

namespace {

// Two-photon loss rotates and shrinks the stabilized cats relative to the
// Hamiltonian ones, so the relaxed codespace is read off the steady state:
// its leading even- and odd-parity eigenvectors, in the reduced basis.
std::pair<CVector, CVector> dissipative_cats(const StaticLindblad& engine) {
  const int n = engine.levels();
  CMatrix g = engine.generator();
  for (int k = 0; k < n * n; ++k) g(0, k) = 0.0;
  for (int i = 0; i < n; ++i) g(0, i * n + i) = 1.0;
  CVector rhs = CVector::Zero(n * n);
  rhs(0) = 1.0;
  const CVector v = g.fullPivLu().solve(rhs);
  CMatrix rho = Eigen::Map<const CMatrix>(v.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const CMatrix& b = engine.basis();
  Eigen::VectorXd parity(n);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < b.rows(); ++k) acc += (k % 2 ? -1.0 : 1.0) * std::norm(b(k, j));
    parity(j) = acc;
  }
  auto leading = [&](double sign) {
    CMatrix block = rho;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (parity(i) * sign < 0.0 || parity(j) * sign < 0.0) block(i, j) = 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
    if (es.info() != Eigen::Success) throw NumericFailure("steady-state eigensolver failed");
    return CVector(es.eigenvectors().col(n - 1));
  };
  return {leading(+1.0), leading(-1.0)};
}

}  // namespace

Trajectory initialization_sim(const KerrCatParams& p0, const NoiseParams& np, double ramp_time, double relax_time,
                              const InitOptions& opt) {
  np.validate();
  if (!(ramp_time > 0.0)) throw InvalidArgument("ramp time must be positive");
  if (relax_time < 0.0) throw InvalidArgument("relax time must be >= 0");
  KerrCatParams p = p0;
  p.dim = resolved_dim(p0);
  const int dim = p.dim;
  const KerrCatOperators ops(dim);

  auto cats_at = [&](double eps2) {
    const double n = std::max(0.0, (eps2 + p.delta / 2.0) / p.kerr);
    const double alpha = std::sqrt(n);
    FockState plus = cat_state(alpha, +1, dim);
    FockState minus = alpha < 1e-6 ? fock_basis(1, dim) : cat_state(alpha, -1, dim);
    return std::pair{plus, minus};
  };

  Trajectory traj;
  for (const char* name : {"p_plus", "p_minus", "leakage", "ramp"}) traj.add(name);
  auto& p_plus = traj.values[0];
  auto& p_minus = traj.values[1];
  auto& leak = traj.values[2];
  auto& ramp_frac = traj.values[3];

  const std::vector<double> ramp_grid = linspace(0.0, ramp_time, opt.ramp_points);
  CMatrix psi = fock_basis(0, dim);
  integrate(
      [&](double t, const CMatrix& s, CMatrix& ds) {
        const double e = p.eps2 * tanh_ramp(t, ramp_time, opt.steepness);
        ds.noalias() = cplx(0.0, -1.0) * (ops.hamiltonian(p.delta, e, p.kerr) * s);
      },
      psi, ramp_grid,
      [&](std::size_t i, const CMatrix& s) {
        const double f = tanh_ramp(ramp_grid[i], ramp_time, opt.steepness);
        const auto [cp, cm] = cats_at(p.eps2 * f);
        const double pp = std::norm(cp.dot(s.col(0)));
        const double pm = std::norm(cm.dot(s.col(0)));
        traj.times.push_back(ramp_grid[i]);
        p_plus.push_back(pp);
        p_minus.push_back(pm);
        leak.push_back(1.0 - pp - pm);
        ramp_frac.push_back(f);
      },
      opt.ode);

  if (relax_time > 0.0) {
    const StaticLindblad engine(ops.hamiltonian(p.delta, p.eps2, p.kerr), standard_collapse_set(np, dim),
                                opt.levels);
    const auto [rp, rm] = dissipative_cats(engine);
    const DensityMatrix rho0 = engine.reduce_state(psi.col(0));
    std::vector<double> grid = linspace(0.0, relax_time, opt.relax_points);
    const auto states = engine.evolve(rho0, grid);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double pp = rp.dot(states[i] * rp).real();
      const double pm = rm.dot(states[i] * rm).real();
      traj.times.push_back(ramp_time + grid[i]);
      p_plus.push_back(pp);
      p_minus.push_back(pm);
      leak.push_back(1.0 - pp - pm);
      ramp_frac.push_back(1.0);
    }
  }
  return traj;
}

}  // namespace kcq
