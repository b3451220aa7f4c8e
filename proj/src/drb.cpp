#include "kcq/drb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kcq/errors.hpp"
#include "kcq/parallel.hpp"
#include "kcq/rng.hpp"

namespace kcq {

namespace {

constexpr const char* kPauliNames = "IXYZ";

void check_basis(int basis) {
  if (basis != 1 && basis != 2) throw InvalidArgument("DRB basis must be 1 or 2");
}

Eigen::Vector4d prepared_state(int basis, double prep_error) {
  Eigen::Vector4d rho = Eigen::Vector4d::Zero();
  rho(0) = 1.0;
  rho(basis == 1 ? 3 : 1) = 1.0 - 2.0 * prep_error;
  return rho;
}

int measured_axis(int basis) { return basis == 1 ? 3 : 1; }

}  // namespace

int drb_character(int basis, int pauli) {
  check_basis(basis);
  if (pauli < 0 || pauli > 3) throw InvalidArgument("Pauli index out of range");
  // Pauli that commutes with the prepared eigenstate keeps the outcome.
  const int kept = basis == 1 ? 3 : 1;
  return (pauli == 0 || pauli == kept) ? 1 : -1;
}

std::string DrbCircuit::text() const {
  std::string s = "P:";
  s += kPauliNames[pauli];
  for (std::size_t j = 0; j < gates.size(); ++j) {
    s += (j + 1 == gates.size()) ? " INV:" : " D:";
    s += to_string(gates[j]);
  }
  return s;
}

DrbCircuit drb_sample(int depth, int basis, std::uint64_t seed) {
  if (depth < 1) throw InvalidArgument("DRB depth must be at least 1");
  check_basis(basis);
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> pick_pauli(0, 3), pick_element(0, 15);
  const auto elements = dihedral_elements();

  DrbCircuit c;
  c.basis = basis;
  c.depth = depth;
  c.seed = seed;
  c.pauli = pick_pauli(eng);
  c.character = drb_character(basis, c.pauli);
  c.gates.reserve(depth + 1);
  DihedralElement total{};
  for (int j = 0; j < depth; ++j) {
    const DihedralElement g = elements[pick_element(eng)];
    c.gates.push_back(g);
    total = dihedral_compose(g, total);
  }
  c.gates.push_back(dihedral_inverse(total));
  return c;
}

void DrbNoise::validate() const {
  auto tp = [](const Ptm& p) { return (p.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() < 1e-9; };
  if (!tp(z_noise) || !tp(x_noise)) throw InvalidArgument("DRB noise channel is not trace preserving");
  if (prep_error < 0 || prep_error > 1 || meas_error < 0 || meas_error > 1)
    throw InvalidArgument("SPAM error probabilities must lie in [0, 1]");
}

Ptm pauli_channel(double px, double py, double pz) {
  if (px < 0 || py < 0 || pz < 0 || px + py + pz > 1) throw InvalidArgument("invalid Pauli probabilities");
  Ptm e = Ptm::Zero();
  e(0, 0) = 1.0;
  e(1, 1) = 1.0 - 2.0 * (py + pz);
  e(2, 2) = 1.0 - 2.0 * (px + pz);
  e(3, 3) = 1.0 - 2.0 * (px + py);
  return e;
}

Ptm noisy_element_ptm(const DihedralElement& g, const DrbNoise& noise) {
  const Ptm ideal = element_ptm(g);
  if (g.k == 0 && g.b == 1) return noise.x_noise * ideal;
  if (g.k == 0 && g.b == 0 && !noise.identity_is_noisy) return ideal;
  return noise.z_noise * ideal;
}

namespace {

using ElementTable = std::array<Ptm, 16>;

ElementTable noisy_table(const DrbNoise& noise) {
  const auto elements = dihedral_elements();
  ElementTable t;
  for (int i = 0; i < 16; ++i) t[i] = noisy_element_ptm(elements[i], noise);
  return t;
}

double expectation(const DrbCircuit& c, const ElementTable& table, const DrbNoise& noise) {
  Eigen::Vector4d v = pauli_ptms()[c.pauli] * prepared_state(c.basis, noise.prep_error);
  for (const auto& g : c.gates) v = table[dihedral_index(g)] * v;
  return (1.0 - 2.0 * noise.meas_error) * v(measured_axis(c.basis));
}

}  // namespace

double drb_expectation(const DrbCircuit& c, const DrbNoise& noise) {
  return expectation(c, noisy_table(noise), noise);
}

double drb_exact_survival(int depth, int basis, const DrbNoise& noise) {
  if (depth < 1) throw InvalidArgument("DRB depth must be at least 1");
  check_basis(basis);
  const auto elements = dihedral_elements();
  const ElementTable phi = noisy_table(noise);
  // step[c][c'] = index of c c'^-1, the gate that moves the running product
  // from c' to c.
  std::array<std::array<int, 16>, 16> step;
  for (int c = 0; c < 16; ++c)
    for (int cp = 0; cp < 16; ++cp)
      step[c][cp] = dihedral_index(dihedral_compose(elements[c], dihedral_inverse(elements[cp])));

  // t[c] = E[ Phi(D_j) ... Phi(D_1) ; D_j ... D_1 = c ].
  std::array<Ptm, 16> t, next;
  for (auto& m : t) m.setZero();
  t[0] = Ptm::Identity();
  for (int j = 0; j < depth; ++j) {
    for (int c = 0; c < 16; ++c) {
      next[c].setZero();
      for (int cp = 0; cp < 16; ++cp) next[c].noalias() += phi[step[c][cp]] * t[cp];
      next[c] /= 16.0;
    }
    t = next;
  }
  Ptm total = Ptm::Zero();
  for (int c = 0; c < 16; ++c) total.noalias() += phi[dihedral_index(dihedral_inverse(elements[c]))] * t[c];

  const Eigen::Vector4d rho = prepared_state(basis, noise.prep_error);
  const auto paulis = pauli_ptms();
  double s = 0.0;
  for (int p = 0; p < 4; ++p)
    s += drb_character(basis, p) * (total * paulis[p] * rho)(measured_axis(basis));
  return (1.0 - 2.0 * noise.meas_error) * s / 4.0;
}

std::uint64_t drb_circuit_seed(std::uint64_t seed, int basis, int depth, int sample) {
  return rng::derive(seed, {std::uint64_t(basis), std::uint64_t(depth), std::uint64_t(sample)});
}

DrbTable drb_run(const DrbNoise& noise, const DrbOptions& opt, std::uint64_t seed) {
  noise.validate();
  std::vector<int> sorted = opt.depths;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.size() < 2)
    throw InvalidArgument("DRB needs at least two distinct depths");
  if (sorted.front() < 1) throw InvalidArgument("DRB depths must be positive");
  if (opt.mode != DrbMode::exact && opt.samples < 1) throw InvalidArgument("DRB needs at least one sample");
  if (opt.mode == DrbMode::sampled && opt.shots < 1) throw InvalidArgument("DRB needs at least one shot");

  DrbTable table;
  table.depths = opt.depths;
  table.mode = opt.mode;
  table.samples = opt.mode == DrbMode::exact ? 0 : opt.samples;
  table.shots = opt.mode == DrbMode::sampled ? opt.shots : 0;
  const std::size_t nd = opt.depths.size();
  for (int b = 0; b < 2; ++b) {
    table.survival[b].assign(nd, 0.0);
    table.stderr_[b].assign(nd, 0.0);
  }

  if (opt.mode == DrbMode::exact) {
    parallel_for(2 * nd, opt.threads, [&](std::size_t i) {
      const int b = static_cast<int>(i / nd);
      table.survival[b][i % nd] = drb_exact_survival(opt.depths[i % nd], b + 1, noise);
    });
    return table;
  }

  const ElementTable elements = noisy_table(noise);
  const std::size_t ns = static_cast<std::size_t>(opt.samples);
  std::vector<double> values(2 * nd * ns);
  parallel_for(values.size(), opt.threads, [&](std::size_t i) {
    const std::size_t s = i % ns;
    const std::size_t d = (i / ns) % nd;
    const int basis = static_cast<int>(i / (ns * nd)) + 1;
    const auto depth = static_cast<std::uint64_t>(opt.depths[d]);
    const DrbCircuit c =
        drb_sample(opt.depths[d], basis, drb_circuit_seed(seed, basis, opt.depths[d], static_cast<int>(s)));
    double gamma = expectation(c, elements, noise);
    if (opt.mode == DrbMode::sampled) {
      auto eng = rng::stream(seed, {std::uint64_t(basis), depth, s, 1});
      const double p_plus = std::clamp(0.5 * (1.0 + gamma), 0.0, 1.0);
      std::binomial_distribution<long> draw(opt.shots, p_plus);
      gamma = 2.0 * static_cast<double>(draw(eng)) / static_cast<double>(opt.shots) - 1.0;
    }
    values[i] = c.character * gamma;
  });

  for (int b = 0; b < 2; ++b)
    for (std::size_t d = 0; d < nd; ++d) {
      const double* v = values.data() + (b * nd + d) * ns;
      double mean = 0.0;
      for (std::size_t s = 0; s < ns; ++s) mean += v[s];
      mean /= static_cast<double>(ns);
      double var = 0.0;
      for (std::size_t s = 0; s < ns; ++s) var += (v[s] - mean) * (v[s] - mean);
      table.survival[b][d] = mean;
      table.stderr_[b][d] = ns > 1 ? std::sqrt(var / static_cast<double>(ns - 1) / static_cast<double>(ns)) : 0.0;
    }
  return table;
}

namespace {

ExpFit fit_basis(const DrbTable& table, int b) {
  // Unweighted point estimate: inverse-variance weights would let the
  // near-zero deep points dominate and make the answer depend on whether
  // shot noise is present. The uncertainty instead comes from the sandwich
  // covariance with the measured per-depth standard errors.
  std::vector<double> n(table.depths.begin(), table.depths.end());
  ExpFit f = fit_exponential(n, table.survival[b]);
  if (table.mode != DrbMode::exact && f.sigma_lambda > 0.0) {
    Eigen::MatrixXd j(n.size(), 2);
    for (std::size_t i = 0; i < n.size(); ++i) {
      j(i, 0) = std::pow(f.lambda, n[i]);
      j(i, 1) = f.A * n[i] * std::pow(f.lambda, n[i] - 1.0);
    }
    const Eigen::Matrix2d bread = (j.transpose() * j).inverse();
    const Eigen::VectorXd var = Eigen::Map<const Eigen::VectorXd>(table.stderr_[b].data(), n.size()).array().square();
    const Eigen::Matrix2d cov = bread * (j.transpose() * var.asDiagonal() * j) * bread;
    f.sigma_A = std::sqrt(std::max(cov(0, 0), 0.0));
    f.sigma_lambda = std::sqrt(std::max(cov(1, 1), 0.0));
  }
  if (!(f.lambda > 0.0)) throw FitFailure("DRB decay rate outside (0, 1]", {});
  if (f.lambda > 1.0 + 1e-6) {
    if (f.lambda - 1.0 > 3.0 * f.sigma_lambda) throw FitFailure("DRB decay rate outside (0, 1]", {});
    f.lambda = 1.0;  // consistent with no decay
  }
  return f;
}

}  // namespace

DrbResult drb_fit(const DrbTable& table, const DrbFitOptions& opt) {
  if (table.depths.size() < 3) throw InvalidArgument("DRB fit needs at least three depths");
  const ExpFit f1 = fit_basis(table, 0);
  const ExpFit f2 = fit_basis(table, 1);

  DrbResult r;
  r.lambda1 = f1.lambda;
  r.lambda2 = f2.lambda;
  r.sigma_lambda1 = f1.sigma_lambda;
  r.sigma_lambda2 = f2.sigma_lambda;
  r.A1 = f1.A;
  r.A2 = f2.A;
  r.scale_bit = opt.scale_bit;
  r.scale_ph = opt.scale_ph;
  r.p_bit_raw = (1.0 - r.lambda1) / 2.0;
  double sigma_ph_raw;
  if (opt.simple_phase) {
    r.p_ph_raw = (1.0 - r.lambda2) / 2.0;
    sigma_ph_raw = r.sigma_lambda2 / 2.0;
  } else {
    r.p_ph_raw = (1.0 - r.lambda2 - r.p_bit_raw) / 2.0;
    sigma_ph_raw = std::hypot(r.sigma_lambda2, r.sigma_lambda1 / 2.0) / 2.0;
  }
  r.p_bit = opt.scale_bit * r.p_bit_raw;
  r.p_ph = opt.scale_ph * r.p_ph_raw;
  r.sigma_p_bit = opt.scale_bit * r.sigma_lambda1 / 2.0;
  r.sigma_p_ph = opt.scale_ph * sigma_ph_raw;
  if (r.p_bit > 0.0) {
    r.eta = r.p_ph / r.p_bit;
  } else {
    r.eta_lower_bound = true;
    r.eta = r.sigma_p_bit > 0.0 ? std::max(r.p_ph, 0.0) / (2.0 * r.sigma_p_bit) : 0.0;
  }
  return r;
}

CalibrationResult drb_scaling_calibration(const std::vector<double>& grid, std::uint64_t seed,
                                          const CalibrationOptions& opt) {
  if (grid.empty()) throw InvalidArgument("calibration grid is empty");
  for (double p : grid)
    if (!(p >= 0.0 && p <= 0.03)) throw InvalidArgument("calibration grid values must lie in [0, 0.03]");
  if (std::all_of(grid.begin(), grid.end(), [](double p) { return p == 0.0; }))
    throw InvalidArgument("calibration grid has no nonzero error");

  CalibrationResult out;
  DrbOptions run{opt.depths, opt.samples, opt.shots, opt.mode, opt.threads};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p_ph = grid[i], p_bit = opt.bit_ratio * grid[i];
    DrbNoise noise;
    noise.z_noise = pauli_channel(p_bit / 2.0, p_bit / 2.0, p_ph);
    const DrbResult fit = drb_fit(drb_run(noise, run, rng::derive(seed, {i})), {1.0, 1.0, false});
    out.rows.push_back({p_bit, p_ph, fit.p_bit_raw, fit.p_ph_raw});
  }
  auto slope = [&](auto real, auto ext) {
    double num = 0.0, den = 0.0;
    for (const auto& r : out.rows) {
      num += real(r) * ext(r);
      den += ext(r) * ext(r);
    }
    if (den <= 0.0) throw NumericFailure("calibration extracted no error");
    return num / den;
  };
  out.scale_bit = slope([](auto& r) { return r.real_bit; }, [](auto& r) { return r.extracted_bit; });
  out.scale_ph = slope([](auto& r) { return r.real_ph; }, [](auto& r) { return r.extracted_ph; });
  return out;
}

}  // namespace kcq
