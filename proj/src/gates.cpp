#include "kcq/gates.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "kcq/errors.hpp"
#include "kcq/parallel.hpp"

namespace kcq {

namespace {

constexpr double kPi = std::numbers::pi;

KerrCatParams resolved(const KerrCatParams& p) {
  KerrCatParams q = p;
  q.dim = resolved_dim(p);
  return q;
}

Eigen::Matrix2cd pauli(int i) {
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (i) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

CMatrix pair_basis_with_z(const CMatrix& basis) {
  Eigen::Matrix2cd z = pauli(3);
  return basis * z * basis.adjoint();
}

void check_pulse(const XGatePulse& pulse) {
  if (!(pulse.t_gate > 0.0)) throw InvalidArgument("X pulse needs t_gate > 0");
  if (!std::isfinite(pulse.delta0)) throw InvalidArgument("X pulse delta0 must be finite");
}

}  // namespace

double modulation_phase(double t, const XGatePulse& pulse) {
  check_pulse(pulse);
  const double T = pulse.t_gate;
  if (t < 0.0 || t > T) throw InvalidArgument("modulation_phase: t outside [0, t_gate]");
  if (t <= T / 3.0) return -pulse.delta0 * t * std::sin(1.5 * kPi * t / T);
  auto f = [T](double s) { return std::exp(-8.0 * (s - T / 3.0) * (s - T / 3.0) / (T * T)); };
  const double fT = f(T);
  const double ft = f(t);
  return -pulse.delta0 * t * ft * (ft - fT) / (1.0 - fT);
}

HamiltonianFn x_gate_hamiltonian(const KerrCatParams& p, const XGatePulse& pulse) {
  check_pulse(pulse);
  const KerrCatParams q = resolved(p);
  auto ops = std::make_shared<const KerrCatOperators>(q.dim);
  return [ops, q, pulse](double t) {
    const double g = modulation_phase(std::clamp(t, 0.0, pulse.t_gate), pulse);
    return ops->hamiltonian(q.delta, q.eps2 * std::exp(cplx(0.0, -g)), q.kerr);
  };
}

FockOperator z_gate_hamiltonian(const KerrCatParams& p, cplx omega) {
  const KerrCatParams q = resolved(p);
  const KerrCatOperators ops(q.dim);
  return ops.hamiltonian(q.delta, q.eps2, q.kerr) + 0.5 * (omega * ops.ad + std::conj(omega) * ops.a);
}

DoubletFrame doublet_frame(const KerrCatParams& p, int pair) {
  if (pair < 0) throw InvalidArgument("doublet_frame: pair must be >= 0");
  DoubletFrame out;
  if (pair == 0) {
    const CatFrame f = cat_frame(p);
    out.basis = f.basis;
    out.logical_Z = f.logical_Z;
    return out;
  }
  const KerrCatParams q = resolved(p);
  const int dim = q.dim;
  const EigenSystem es = eig_hermitian(build_hamiltonian(q));
  const int hi = dim - 1 - 2 * pair;
  if (hi - 1 < 0) throw InvalidArgument("doublet_frame: pair index exceeds the truncation");
  CMatrix two(dim, 2);
  two.col(0) = es.vectors.col(hi);
  two.col(1) = es.vectors.col(hi - 1);
  const CMatrix par = two.adjoint() * parity_op(dim) * two;
  Eigen::SelfAdjointEigenSolver<CMatrix> ps(0.5 * (par + par.adjoint()));
  FockState odd = two * ps.eigenvectors().col(0);
  FockState even = two * ps.eigenvectors().col(1);

  // Largest component of the even state real positive, then the odd phase
  // such that <even|x|odd> is real positive, which puts |0> in the +x well.
  Eigen::Index k = 0;
  even.cwiseAbs().maxCoeff(&k);
  even *= std::conj(even(k)) / std::abs(even(k));
  const FockOperator x = (annihilation_op(dim) + creation_op(dim)) / std::sqrt(2.0);
  const cplx m = even.dot(x * odd);
  if (std::abs(m) < 1e-9) throw NumericFailure("doublet_frame: doublet has no dipole coupling to fix phases");
  odd *= std::conj(m) / std::abs(m);

  out.basis.resize(dim, 2);
  out.basis.col(0) = (even + odd) / std::sqrt(2.0);
  out.basis.col(1) = (even - odd) / std::sqrt(2.0);
  out.logical_Z = pair_basis_with_z(out.basis);
  return out;
}

GateRun x_gate_sim(const KerrCatParams& p, const NoiseParams* np, const XGatePulse& pulse, const FockState& psi0,
                   const DoubletFrame* frame, const OdeOptions& ode) {
  const KerrCatParams q = resolved(p);
  if (psi0.size() != q.dim) throw InvalidArgument("x_gate_sim: initial state has the wrong dimension");
  DoubletFrame own;
  if (!frame) {
    own = doublet_frame(q, 0);
    frame = &own;
  }
  const HamiltonianFn h = x_gate_hamiltonian(q, pulse);
  const std::vector<double> grid{0.0, pulse.t_gate};
  GateRun run;
  run.z_initial = expectation(frame->logical_Z, psi0).real();
  if (!np) {
    run.state = schrodinger_evolve(h, psi0, grid, {}, ode).state;
    run.z_final = expectation(frame->logical_Z, run.state).real();
    run.leakage = 1.0 - (frame->basis.adjoint() * run.state).squaredNorm();
  } else {
    np->validate();
    const DensityMatrix rho0 = psi0 * psi0.adjoint();
    run.rho = lindblad_evolve(h, standard_collapse_set(*np, q.dim), rho0, grid, {}, ode).state;
    run.z_final = expectation_dm(frame->logical_Z, run.rho).real();
    run.leakage = 1.0 - (frame->basis.adjoint() * run.rho * frame->basis).trace().real();
  }
  return run;
}

GateRun z_gate_sim(const KerrCatParams& p, const ZGatePulse& pulse, const FockState& psi0, const OdeOptions& ode) {
  if (pulse.duration < 0.0) throw InvalidArgument("Z pulse duration must be >= 0");
  const KerrCatParams q = resolved(p);
  if (psi0.size() != q.dim) throw InvalidArgument("z_gate_sim: initial state has the wrong dimension");
  const CatFrame f = cat_frame(q);
  const FockOperator h = z_gate_hamiltonian(q, pulse.omega);
  GateRun run;
  run.z_initial = expectation(f.logical_Z, psi0).real();
  run.state = pulse.duration == 0.0
                  ? psi0
                  : schrodinger_evolve([&h](double) { return h; }, psi0, {0.0, pulse.duration}, {}, ode).state;
  run.z_final = expectation(f.logical_Z, run.state).real();
  run.leakage = 1.0 - f.to_logical(run.state).squaredNorm();
  return run;
}

RotationFit z_rotation_rate(const KerrCatParams& p, cplx omega, double t_max, int n_points, const OdeOptions& ode) {
  if (!(t_max > 0.0) || n_points < 3) throw InvalidArgument("z_rotation_rate needs t_max > 0 and >= 3 points");
  const KerrCatParams q = resolved(p);
  const CatFrame f = cat_frame(q);
  const FockOperator h = z_gate_hamiltonian(q, omega);
  RotationFit r;
  for (int i = 0; i < n_points; ++i) r.times.push_back(t_max * i / (n_points - 1));
  const KetEvolution ev = schrodinger_evolve([&h](double) { return h; }, f.even, r.times,
                                             {{"X", f.logical_X}, {"Y", f.logical_Y}}, ode);
  const auto& xs = ev.traj.series("X");
  const auto& ys = ev.traj.series("Y");
  double prev = 0.0;
  for (int i = 0; i < n_points; ++i) {
    double a = std::atan2(ys[i], xs[i]);
    if (i > 0) a += 2.0 * kPi * std::round((prev - a) / (2.0 * kPi));
    r.angles.push_back(a);
    prev = a;
  }
  double mt = 0.0, ma = 0.0;
  for (int i = 0; i < n_points; ++i) {
    mt += r.times[i];
    ma += r.angles[i];
  }
  mt /= n_points;
  ma /= n_points;
  double stt = 0.0, sta = 0.0, saa = 0.0;
  for (int i = 0; i < n_points; ++i) {
    stt += (r.times[i] - mt) * (r.times[i] - mt);
    sta += (r.times[i] - mt) * (r.angles[i] - ma);
    saa += (r.angles[i] - ma) * (r.angles[i] - ma);
  }
  r.rate = sta / stt;
  r.r2 = saa > 0.0 ? sta * sta / (stt * saa) : 1.0;
  return r;
}

LogicalChannel extract_logical_channel(const CMatrix& evolved, const CatFrame& frame) {
  if (evolved.rows() != frame.dim || evolved.cols() != 2)
    throw InvalidArgument("extract_logical_channel: expected dim x 2 evolved basis");
  const Eigen::Matrix2cd m = frame.basis.adjoint() * evolved;
  LogicalChannel ch;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      ch.ptm(i, j) = 0.5 * (pauli(i) * m * pauli(j) * m.adjoint()).trace().real();
  ch.leakage = std::clamp(1.0 - 0.5 * (m.adjoint() * m).trace().real(), 0.0, 1.0);
  return ch;
}

LogicalChannel extract_logical_channel(const std::function<DensityMatrix(const DensityMatrix&)>& gate,
                                       const CatFrame& frame) {
  LogicalChannel ch;
  for (int j = 0; j < 4; ++j) {
    const DensityMatrix out = gate(frame.basis * pauli(j) * frame.basis.adjoint());
    const Eigen::Matrix2cd red = frame.basis.adjoint() * out * frame.basis;
    for (int i = 0; i < 4; ++i) ch.ptm(i, j) = 0.5 * (pauli(i) * red).trace().real();
  }
  ch.leakage = std::clamp(1.0 - ch.ptm(0, 0), 0.0, 1.0);
  return ch;
}

LogicalChannel x_gate_channel(const KerrCatParams& p, const XGatePulse& pulse, const NoiseParams* np, int count,
                              const OdeOptions& ode) {
  if (count < 1) throw InvalidArgument("x_gate_channel: count must be >= 1");
  const KerrCatParams q = resolved(p);
  const CatFrame f = cat_frame(q);
  const HamiltonianFn h = x_gate_hamiltonian(q, pulse);
  if (!np) {
    CMatrix kets = f.basis;
    for (int c = 0; c < count; ++c) kets = evolve_kets(h, kets, 0.0, pulse.t_gate, ode);
    return extract_logical_channel(kets, f);
  }
  np->validate();
  const auto collapse = standard_collapse_set(*np, q.dim);
  auto gate = [&](const DensityMatrix& rho) {
    DensityMatrix r = rho;
    for (int c = 0; c < count; ++c) r = lindblad_evolve(h, collapse, r, {0.0, pulse.t_gate}, {}, ode).state;
    return r;
  };
  return extract_logical_channel(gate, f);
}

LogicalChannel z_gate_channel(const KerrCatParams& p, const ZGatePulse& pulse, const OdeOptions& ode) {
  if (pulse.duration < 0.0) throw InvalidArgument("Z pulse duration must be >= 0");
  const KerrCatParams q = resolved(p);
  const CatFrame f = cat_frame(q);
  if (pulse.duration == 0.0) return extract_logical_channel(f.basis, f);
  const FockOperator h = z_gate_hamiltonian(q, pulse.omega);
  return extract_logical_channel(evolve_kets([&h](double) { return h; }, f.basis, 0.0, pulse.duration, ode), f);
}

double ptm_distance(const Ptm& a, const Ptm& b) { return (a - b).norm(); }

ChevronMap x_chevron(const KerrCatParams& p, const std::vector<double>& delta0_grid,
                     const std::vector<double>& t_gate_grid, bool excited, int threads, const OdeOptions& ode) {
  if (delta0_grid.empty() || t_gate_grid.empty()) throw InvalidArgument("x_chevron: empty grid");
  const KerrCatParams q = resolved(p);
  const DoubletFrame frame = doublet_frame(q, excited ? 1 : 0);
  const FockState psi0 = frame.basis.col(0);
  ChevronMap map{"delta0", "t_gate", "expZ", delta0_grid, t_gate_grid,
                 Eigen::MatrixXd(delta0_grid.size(), t_gate_grid.size())};
  const std::size_t nt = t_gate_grid.size();
  parallel_for(delta0_grid.size() * nt, threads, [&](std::size_t k) {
    const std::size_t i = k / nt, j = k % nt;
    map.values(i, j) = x_gate_sim(q, nullptr, {delta0_grid[i], t_gate_grid[j]}, psi0, &frame, ode).z_final;
  });
  return map;
}

ChevronMap z_chevron(const KerrCatParams& p, double omega_abs, const std::vector<double>& phase_grid,
                     const std::vector<double>& duration_grid, int threads, const OdeOptions& ode) {
  if (phase_grid.empty() || duration_grid.empty()) throw InvalidArgument("z_chevron: empty grid");
  const KerrCatParams q = resolved(p);
  const CatFrame f = cat_frame(q);
  ChevronMap map{"phase", "duration", "expY", phase_grid, duration_grid,
                 Eigen::MatrixXd(phase_grid.size(), duration_grid.size())};
  const std::size_t nt = duration_grid.size();
  parallel_for(phase_grid.size() * nt, threads, [&](std::size_t k) {
    const std::size_t i = k / nt, j = k % nt;
    const ZGatePulse pulse{std::polar(omega_abs, phase_grid[i]), duration_grid[j]};
    map.values(i, j) = expectation(f.logical_Y, z_gate_sim(q, pulse, f.even, ode).state).real();
  });
  return map;
}

XGateOptimum optimize_x_gate(const KerrCatParams& p, const std::vector<double>& delta0_grid,
                             const std::vector<double>& t_gate_grid, int threads, const OdeOptions& ode) {
  if (delta0_grid.empty() || t_gate_grid.empty()) throw InvalidArgument("optimize_x_gate: empty grid");
  const KerrCatParams q = resolved(p);
  const Ptm target = rotation_ptm('x', kPi / 2.0);
  auto infidelity = [&](double d0, double tg) {
    if (!(tg > 0.0)) return 1.0;
    return 1.0 - process_fidelity(x_gate_channel(q, {d0, tg}, nullptr, 1, ode).ptm, target);
  };

  const std::size_t nt = t_gate_grid.size();
  std::vector<double> coarse(delta0_grid.size() * nt);
  parallel_for(coarse.size(), threads, [&](std::size_t k) {
    coarse[k] = infidelity(delta0_grid[k / nt], t_gate_grid[k % nt]);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < coarse.size(); ++k)
    if (coarse[k] < coarse[best]) best = k;

  const double d_step = delta0_grid.size() > 1 ? std::abs(delta0_grid[1] - delta0_grid[0]) / 2.0 : 0.5;
  const double t_step = nt > 1 ? std::abs(t_gate_grid[1] - t_gate_grid[0]) / 2.0 : 0.5;
  int evaluations = static_cast<int>(coarse.size());
  const MinimizeResult nm = nelder_mead(
      [&](const std::vector<double>& x) {
        ++evaluations;
        return infidelity(x[0], x[1]);
      },
      {delta0_grid[best / nt], t_gate_grid[best % nt]}, {d_step, t_step}, 1e-4, 200);

  XGateOptimum out;
  const bool refined = nm.f < coarse[best];
  out.pulse = refined ? XGatePulse{nm.x[0], nm.x[1]} : XGatePulse{delta0_grid[best / nt], t_gate_grid[best % nt]};
  out.channel = x_gate_channel(q, out.pulse, nullptr, 1, ode);
  out.fidelity = process_fidelity(out.channel.ptm, target);
  out.evaluations = evaluations + 1;
  return out;
}

}  // namespace kcq
