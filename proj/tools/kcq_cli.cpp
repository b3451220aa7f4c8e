// Command-line front end: every subcommand reads one configuration, writes
// CSV/JSON artifacts plus a manifest into the output directory.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "kcq/dihedral.hpp"
#include "kcq/errors.hpp"
#include "kcq/gates.hpp"
#include "kcq/rng.hpp"
#include "kcq/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kcq;
using namespace kcq::cli;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json ptm_json(const Ptm& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return {{"basis_order", {"I", "X", "Y", "Z"}}, {"matrix", rows}};
}

json generator_json(const ErrorGenerator& g, std::optional<double> residual = {}) {
  json j = {{"h", g.h}, {"p", g.p}};
  if (residual) j["residual"] = *residual;
  return j;
}

// Collects artifacts of one run and keeps the manifest up to date.
class Run {
 public:
  Run(std::string command, const ExperimentConfig& cfg, fs::path dir, bool analytic)
      : command_(std::move(command)), cfg_(cfg), dir_(std::move(dir)), analytic_(analytic) {}

  void start() {
    fs::create_directories(dir_);
    write_manifest("running", "");
  }
  void finish() { write_manifest("complete", ""); }
  void fail(const std::string& what) { write_manifest("failed", what); }

  std::ofstream open(const std::string& name) {
    outputs_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return out;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << "\n"; }

  const fs::path& dir() const { return dir_; }

 private:
  void write_manifest(const std::string& status, const std::string& error) {
    json versions = json::object();
    for (const auto& [name, v] : build_versions()) versions[name] = v;
    json m = {{"command", command_},
              {"config_hash", config_hash(cfg_)},
              {"seed", cfg_.seed},
              {"analytic", analytic_},
              {"versions", versions},
              {"status", status},
              {"outputs", outputs_}};
    if (!error.empty()) m["error"] = error;
    std::string name = command_;
    std::replace(name.begin(), name.end(), ' ', '_');
    std::ofstream out(dir_ / (name + ".manifest.json"), std::ios::binary);
    out << m.dump(2) << "\n";
  }

  std::string command_;
  const ExperimentConfig& cfg_;
  fs::path dir_;
  bool analytic_;
  std::vector<std::string> outputs_;
};

struct Context {
  const ExperimentConfig& cfg;
  Run& run;
  int threads;
  bool analytic;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input " + path);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      if (cells != header) throw UsageError(path + ":1: unexpected header");
      first = false;
      continue;
    }
    if (cells.size() != header.size())
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " columns");
    rows.push_back(cells);
  }
  if (first) throw UsageError(path + ": empty file");
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError(where + ": bad number '" + s + "'");
  return v;
}

// ---------------------------------------------------------------- model

void cmd_spectrum(Context& c) {
  SpectrumOptions opt = c.cfg.spectrum.opt;
  opt.threads = c.threads;
  const auto rows = spectrum_vs_detuning(c.cfg.system.eps2, c.cfg.system.kerr, c.cfg.spectrum.delta, opt);
  auto csv = c.run.open("spectrum.csv");
  csv << "delta_over_k,level,energy_over_k\n";
  json report = {{"eps2_over_k", c.cfg.system.eps2}, {"threshold_over_k", opt.threshold}, {"rows", json::array()}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t l = 0; l < r.levels.size(); ++l)
      csv << num(c.cfg.spectrum.delta[i]) << "," << l << "," << num(r.levels[l]) << "\n";
    report["rows"].push_back({{"delta_over_k", c.cfg.spectrum.delta[i]},
                              {"ground_splitting", r.ground_splitting},
                              {"pair_gaps", r.pair_gaps},
                              {"degenerate_pairs", r.degenerate_pairs},
                              {"degenerate", !r.degenerate_pairs.empty()}});
  }
  c.run.write_json("degeneracy.json", report);
}

// ------------------------------------------------------------- dynamics

void write_trajectory(Run& run, const std::string& name, const Trajectory& t, const Units& u) {
  auto csv = run.open(name);
  csv << "t,observable_name,value\n";
  for (std::size_t k = 0; k < t.names.size(); ++k)
    for (std::size_t i = 0; i < t.times.size(); ++i)
      csv << num(u.to_us(t.times[i])) << "," << t.names[k] << "," << num(t.values[k][i]) << "\n";
}

json decay_json(const DecayFit& f, const Units& u) {
  // Times in µs.
  return {{"A", f.A},
          {"C", f.C},
          {"T", f.lower_bound ? json(nullptr) : json(u.to_us(f.T))},
          {"sigma_A", f.sigma_A},
          {"sigma_C", f.sigma_C},
          {"sigma_T", u.to_us(f.sigma_T)},
          {"n_points", f.n_points},
          {"lower_bound", f.lower_bound},
          {"T_lower", u.to_us(f.T_lower)}};
}

void cmd_lifetimes(Context& c) {
  const auto& lc = c.cfg.lifetimes;
  const Units& u = c.cfg.units;
  LifetimeOptions opt = lc.opt;
  opt.threads = c.threads;
  json out = json::array();
  auto summary = c.run.open("lifetimes.csv");
  summary << "delta_over_k,eps2_over_k,quantity,T_us,sigma_T_us,lower_bound\n";
  for (std::size_t i = 0; i < lc.delta.size(); ++i) {
    const KerrCatParams p{lc.delta[i], lc.mean_photon - lc.delta[i] / 2.0, c.cfg.system.kerr, c.cfg.system.dim};
    for (int q = 0; q < 2; ++q) {
      if ((q == 0 && !lc.bit_flip) || (q == 1 && !lc.phase_flip)) continue;
      const std::string name = q == 0 ? "T_z" : "T_y";
      const std::uint64_t seed = rng::derive(c.cfg.seed, {i, static_cast<std::uint64_t>(q)});
      const LifetimeResult r = q == 0 ? bit_flip_time(p, c.cfg.noise, lc.t_max, seed, opt)
                                      : phase_flip_time(p, c.cfg.noise, lc.t_max, seed, opt);
      write_trajectory(c.run, "trajectory_" + name + "_" + std::to_string(i) + ".csv", r.traj, u);
      json j = decay_json(r.fit, u);
      j["quantity"] = name;
      j["delta_over_k"] = p.delta;
      j["eps2_over_k"] = p.eps2;
      j["t_max_us"] = u.to_us(r.t_max);
      out.push_back(j);
      summary << num(p.delta) << "," << num(p.eps2) << "," << name << ","
              << num(r.fit.lower_bound ? r.fit.T_lower : u.to_us(r.fit.T)) << "," << num(u.to_us(r.fit.sigma_T))
              << "," << (r.fit.lower_bound ? 1 : 0) << "\n";
    }
  }
  c.run.write_json("lifetimes.json", out);
}

void cmd_init(Context& c) {
  const auto& ic = c.cfg.init;
  const Trajectory t = initialization_sim(c.cfg.system, c.cfg.noise, ic.ramp_time, ic.relax_time, ic.opt);
  write_trajectory(c.run, "init.csv", t, c.cfg.units);
  json final_values = json::object();
  for (std::size_t k = 0; k < t.names.size(); ++k) final_values[t.names[k]] = t.values[k].back();
  c.run.write_json("init.json", {{"ramp_us", c.cfg.units.to_us(ic.ramp_time)},
                                 {"relax_us", c.cfg.units.to_us(ic.relax_time)},
                                 {"final", final_values}});
}

// ---------------------------------------------------------------- gates

json channel_json(const LogicalChannel& ch) {
  json j = ptm_json(ch.ptm);
  j["leakage"] = ch.leakage;
  return j;
}

void cmd_chevron(Context& c) {
  const auto& cc = c.cfg.chevron;
  const Units& u = c.cfg.units;
  const KerrCatParams& p = c.cfg.system;
  if (cc.run_x) {
    const ChevronMap m = x_chevron(p, cc.delta0, cc.t_gate, cc.excited, c.threads);
    auto csv = c.run.open(cc.excited ? "chevron_x_excited.csv" : "chevron_x.csv");
    csv << "delta0,t_gate,expZ\n";
    for (std::size_t i = 0; i < m.xs.size(); ++i)
      for (std::size_t j = 0; j < m.ts.size(); ++j)
        csv << num(u.to_mhz(m.xs[i])) << "," << num(u.to_us(m.ts[j])) << "," << num(m.values(i, j)) << "\n";
  }
  if (cc.run_z) {
    const ChevronMap m = z_chevron(p, cc.omega_abs, cc.phase, cc.duration, c.threads);
    auto csv = c.run.open("chevron_z.csv");
    csv << "phase,duration,expY\n";
    for (std::size_t i = 0; i < m.xs.size(); ++i)
      for (std::size_t j = 0; j < m.ts.size(); ++j)
        csv << num(m.xs[i]) << "," << num(u.to_us(m.ts[j])) << "," << num(m.values(i, j)) << "\n";

    // Z(pi/2) with the duration taken from the fitted rotation rate.
    const double omega_c = 2.0 * cc.omega_abs * std::abs(cat_frame(p).alpha);
    const RotationFit fit = z_rotation_rate(p, cc.omega_abs, std::numbers::pi / omega_c);
    const double duration = (std::numbers::pi / 2.0) / fit.rate;
    const LogicalChannel ch = z_gate_channel(p, {cc.omega_abs, duration});
    c.run.write_json("z_gate.json", {{"omega_mhz", u.to_mhz(cc.omega_abs)},
                                     {"predicted_rate_per_us", omega_c / u.to_us(1.0)},
                                     {"fitted_rate_per_us", fit.rate / u.to_us(1.0)},
                                     {"r2", fit.r2},
                                     {"duration_us", u.to_us(duration)},
                                     {"fidelity", process_fidelity(ch.ptm, rotation_ptm('z', std::numbers::pi / 2))},
                                     {"channel", channel_json(ch)}});
  }
  if (cc.optimize) {
    const XGateOptimum opt = optimize_x_gate(p, cc.opt_delta0, cc.opt_t_gate, c.threads);
    c.run.write_json("x_gate.json", {{"delta0_mhz", u.to_mhz(opt.pulse.delta0)},
                                     {"t_gate_us", u.to_us(opt.pulse.t_gate)},
                                     {"fidelity", opt.fidelity},
                                     {"evaluations", opt.evaluations},
                                     {"channel", channel_json(opt.channel)}});
  }
}

// -------------------------------------------------------------- readout

void cmd_readout(Context& c) {
  const auto& rc = c.cfg.readout;
  const ReadoutRun r = simulate_readout(rc.cqr, rc.true_state, rc.shots, c.cfg.seed);
  auto csv = c.run.open("histogram.csv");
  csv << "pointer_re,pointer_im,label\n";
  for (const auto& rec : r.records)
    csv << num(rec.pointer.real()) << "," << num(rec.pointer.imag()) << "," << rec.label << "\n";
  const double e = misread_probability(rc.cqr);
  const cplx b = cqr_steady_state(rc.cqr, rc.cqr.alpha);
  c.run.write_json("qndness.json",
                   {{"qndness", r.qndness},
                    {"p_plus_given_plus", r.p_plus_given_plus},
                    {"p_minus_given_minus", r.p_minus_given_minus},
                    {"pairs_plus", r.pairs_plus},
                    {"pairs_minus", r.pairs_minus},
                    {"analytic_qndness", qndness_markov(rc.cqr.flip_prob_per_read, e, rc.true_state, rc.shots)},
                    {"misread_probability", e},
                    {"flip_prob_per_read", rc.cqr.flip_prob_per_read},
                    {"steady_pointer", {b.real(), b.imag()}},
                    {"snr", rc.cqr.noise_sigma > 0 ? json(std::abs(b) / rc.cqr.noise_sigma) : json(nullptr)}});
}

// -------------------------------------------------------------- channel

void cmd_twirl(Context& c) {
  const ErrorGenerator& g = c.cfg.twirl;
  const Eigen::Matrix4d l = build_error_generator(g);
  const Ptm e = ptm_exp(l);
  const Ptm tw = pauli_twirl(e);
  const GeneratorFit twirled = decompose_generator(ptm_log(tw));
  const ErrorGenerator reduced = pauli_reduced(g);
  const auto probs = pauli_probabilities(tw);
  const Ptm dt = dihedral_twirl(e);
  c.run.write_json("twirl.json", {{"generator", generator_json(g)},
                                  {"ptm", ptm_json(e)},
                                  {"pauli_twirled_ptm", ptm_json(tw)},
                                  {"twirled_generator", generator_json(twirled.g, twirled.residual)},
                                  {"pauli_reduced", generator_json(reduced)},
                                  {"pauli_probabilities", probs},
                                  {"pauli_infidelity", pauli_channel_infidelity(g)},
                                  {"process_fidelity", process_fidelity(e, Ptm::Identity())},
                                  {"dihedral_lambda1", dt(3, 3)},
                                  {"dihedral_lambda2", 0.5 * (dt(1, 1) + dt(2, 2))}});
}

// ------------------------------------------------------------------ DRB

DrbOptions drb_options(const Context& c) {
  DrbOptions opt = c.cfg.drb.opt;
  opt.threads = c.threads;
  if (c.analytic && opt.mode == DrbMode::sampled) opt.mode = DrbMode::analytic;
  return opt;
}

void cmd_drb_sample(Context& c) {
  const DrbOptions opt = drb_options(c);
  auto out = c.run.open("drb_circuits.txt");
  for (int basis = 1; basis <= 2; ++basis)
    for (int depth : opt.depths)
      for (int s = 0; s < opt.samples; ++s)
        out << drb_sample(depth, basis, drb_circuit_seed(c.cfg.seed, basis, depth, s)).text() << "\n";
}

void write_survival(Run& run, const DrbTable& t) {
  auto csv = run.open("drb_survival.csv");
  csv << "depth,basis,survival,stderr\n";
  for (int b = 0; b < 2; ++b)
    for (std::size_t d = 0; d < t.depths.size(); ++d)
      csv << t.depths[d] << "," << b + 1 << "," << num(t.survival[b][d]) << "," << num(t.stderr_[b][d]) << "\n";
}

json drb_result_json(const DrbResult& r) {
  return {{"lambda1", r.lambda1},         {"lambda2", r.lambda2},
          {"sigma_lambda1", r.sigma_lambda1}, {"sigma_lambda2", r.sigma_lambda2},
          {"A1", r.A1},                   {"A2", r.A2},
          {"p_bit_raw", r.p_bit_raw},     {"p_ph_raw", r.p_ph_raw},
          {"p_bit", r.p_bit},             {"p_ph", r.p_ph},
          {"sigma_p_bit", r.sigma_p_bit}, {"sigma_p_ph", r.sigma_p_ph},
          {"eta", r.eta},                 {"eta_lower_bound", r.eta_lower_bound},
          {"scale_bit", r.scale_bit},     {"scale_ph", r.scale_ph}};
}

void cmd_drb_run(Context& c) { write_survival(c.run, drb_run(c.cfg.drb.noise, drb_options(c), c.cfg.seed)); }

DrbTable read_survival(const std::string& path) {
  const auto rows = read_csv(path, {"depth", "basis", "survival", "stderr"});
  DrbTable t;
  std::array<std::map<int, std::pair<double, double>>, 2> by_basis;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = path + ":" + std::to_string(i + 2);
    const double depth = parse_double(rows[i][0], where), basis = parse_double(rows[i][1], where);
    if (depth < 1 || depth != std::floor(depth)) throw UsageError(where + ": depth must be a positive integer");
    if (basis != 1 && basis != 2) throw UsageError(where + ": basis must be 1 or 2");
    by_basis[static_cast<int>(basis) - 1][static_cast<int>(depth)] = {parse_double(rows[i][2], where),
                                                                      parse_double(rows[i][3], where)};
  }
  for (const auto& [d, v] : by_basis[0]) {
    if (!by_basis[1].count(d)) throw UsageError(path + ": depth " + std::to_string(d) + " missing for basis 2");
    t.depths.push_back(d);
    for (int b = 0; b < 2; ++b) {
      t.survival[b].push_back(by_basis[b].at(d).first);
      t.stderr_[b].push_back(by_basis[b].at(d).second);
    }
  }
  if (by_basis[1].size() != by_basis[0].size()) throw UsageError(path + ": bases have different depth sets");
  return t;
}

void cmd_drb_fit(Context& c, const DrbTable& table) {
  c.run.write_json("drb_result.json", drb_result_json(drb_fit(table, c.cfg.drb.fit)));
}

void cmd_drb_calibrate(Context& c) {
  CalibrationOptions opt = c.cfg.drb.cal;
  opt.threads = c.threads;
  if (c.analytic && opt.mode == DrbMode::sampled) opt.mode = DrbMode::analytic;
  const CalibrationResult r = drb_scaling_calibration(c.cfg.drb.cal_grid, c.cfg.seed, opt);
  auto csv = c.run.open("calibration.csv");
  csv << "real_bit,real_ph,extracted_bit,extracted_ph\n";
  for (const auto& row : r.rows)
    csv << num(row.real_bit) << "," << num(row.real_ph) << "," << num(row.extracted_bit) << ","
        << num(row.extracted_ph) << "\n";
  c.run.write_json("slopes.json", {{"scale_bit", r.scale_bit}, {"scale_ph", r.scale_ph}});
}

// ------------------------------------------------------------------ GST

std::vector<GateString> gst_circuit_list() {
  std::vector<GateString> out;
  for (const auto& c : gst_generate(default_gst_design())) out.push_back(c.gates);
  return out;
}

void write_gst_circuits(Run& run, const std::vector<GateString>& circuits) {
  auto out = run.open("gst_circuits.txt");
  for (const auto& s : circuits) out << to_string(s) << "\n";
}

void cmd_gst_generate(Context& c) { write_gst_circuits(c.run, gst_circuit_list()); }

void cmd_gst_simulate(Context& c) {
  const auto circuits = gst_circuit_list();
  write_gst_circuits(c.run, circuits);
  const GateNoiseModel model = noisy_gate_set(c.cfg.gst.gx, c.cfg.gst.gz);
  const GstDataset d = gst_simulate(circuits, model, c.analytic ? 0 : c.cfg.gst.shots, c.cfg.seed, c.threads);
  auto csv = c.run.open("gst_dataset.csv");
  csv << "circuit_id,n0,n1\n";
  for (std::size_t i = 0; i < circuits.size(); ++i) csv << i << "," << num(d.n0[i]) << "," << num(d.n1[i]) << "\n";
}

GstDataset read_gst_dataset(const std::string& path) {
  const auto circuits = gst_circuit_list();
  const auto rows = read_csv(path, {"circuit_id", "n0", "n1"});
  GstDataset d;
  bool integral = true;
  long shots = -1;
  std::vector<bool> seen(circuits.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = path + ":" + std::to_string(i + 2);
    const double id = parse_double(rows[i][0], where);
    if (id < 0 || id >= static_cast<double>(circuits.size()) || id != std::floor(id))
      throw UsageError(where + ": circuit_id out of range");
    const auto k = static_cast<std::size_t>(id);
    if (seen[k]) throw UsageError(where + ": duplicate circuit_id");
    seen[k] = true;
    const double n0 = parse_double(rows[i][1], where), n1 = parse_double(rows[i][2], where);
    if (n0 < 0 || n1 < 0 || n0 + n1 <= 0) throw UsageError(where + ": counts must be >= 0 with a positive total");
    d.circuits.push_back(circuits[k]);
    d.n0.push_back(n0);
    d.n1.push_back(n1);
    integral = integral && n0 == std::floor(n0) && n1 == std::floor(n1);
    if (shots < 0) shots = static_cast<long>(n0 + n1);
  }
  d.shots = integral ? shots : 0;
  return d;
}

void cmd_gst_estimate(Context& c, const GstDataset& data) {
  const GstEstimate est = lgst_estimate(data, c.cfg.gst.opt);
  const GateNoiseModel ideal = ideal_gate_set();
  json gates = json::object();
  for (const auto& [name, ptm] : est.gates) {
    const Ptm& target = ideal.gates.at(name);
    json g = ptm_json(ptm);
    try {
      const GeneratorFit fit = gate_error_generator(ptm, target);
      g["error_generator"] = generator_json(fit.g, fit.residual);
    } catch (const AmbiguousLog&) {
      g["error_generator"] = nullptr;
    }
    g["fidelity"] = process_fidelity(ptm, target);
    gates[name] = g;
  }
  c.run.write_json("gst_estimate.json", {{"gates", gates},
                                         {"gram_condition", est.gram_condition},
                                         {"refined", est.refined},
                                         {"chi2", est.chi2},
                                         {"shots", data.shots},
                                         {"circuits", data.circuits.size()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-cat qubit simulation and benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "kcq_out", input;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool analytic = false;
  app.add_option("--config", config_path, "JSON configuration (defaults when omitted)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed, overrides the configuration");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--analytic", analytic, "exact probabilities instead of finite shots where applicable");

  std::string command;
  std::function<void(Context&)> action;

  auto simple = [&](const std::string& name, const std::string& help, std::function<void(Context&)> fn) {
    app.add_subcommand(name, help)->callback([&command, &action, name, fn] {
      command = name;
      action = fn;
    });
  };
  simple("spectrum", "spectrum and excited-pair degeneracy versus detuning", cmd_spectrum);
  simple("lifetimes", "bit-flip and phase-flip times versus detuning", cmd_lifetimes);
  simple("init", "stabilization ramp and relaxation from vacuum", cmd_init);
  simple("chevron", "X and Z gate Chevron maps and gate calibration", cmd_chevron);
  simple("readout", "cat-quadrature readout histogram and QNDness", cmd_readout);
  simple("twirl", "error-generator and twirling report", cmd_twirl);

  DrbTable drb_table;
  GstDataset gst_data;
  auto* drb = app.add_subcommand("drb", "dihedral randomized benchmarking");
  drb->require_subcommand(1);
  auto nested = [&](CLI::App* parent, const std::string& name, const std::string& help,
                    std::function<void(Context&)> fn) {
    auto* sub = parent->add_subcommand(name, help);
    sub->callback([&command, &action, parent, name, fn] {
      command = parent->get_name() + " " + name;
      action = fn;
    });
    return sub;
  };
  nested(drb, "sample", "write the random circuits", cmd_drb_sample);
  nested(drb, "run", "simulate survival tables", cmd_drb_run);
  nested(drb, "fit", "fit survival tables", [&drb_table](Context& c) { cmd_drb_fit(c, drb_table); })
      ->add_option("--input", input, "survival CSV (default: OUT/drb_survival.csv)");
  nested(drb, "calibrate", "scaling-factor calibration", cmd_drb_calibrate);

  auto* gst = app.add_subcommand("gst", "gate set tomography");
  gst->require_subcommand(1);
  nested(gst, "generate", "write the circuit list", cmd_gst_generate);
  nested(gst, "simulate", "simulate a dataset", cmd_gst_simulate);
  nested(gst, "estimate", "linear-inversion estimate", [&gst_data](Context& c) { cmd_gst_estimate(c, gst_data); })
      ->add_option("--input", input, "dataset CSV (default: OUT/gst_dataset.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, seed);
    if (command == "drb fit")
      drb_table = read_survival(input.empty() ? (fs::path(out_dir) / "drb_survival.csv").string() : input);
    if (command == "gst estimate")
      gst_data = read_gst_dataset(input.empty() ? (fs::path(out_dir) / "gst_dataset.csv").string() : input);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Run run(command, cfg, out_dir, analytic);
  try {
    run.start();
    Context ctx{cfg, run, threads, analytic};
    action(ctx);
    run.finish();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      run.fail(e.what());
    } catch (...) {
    }
    return kExitRuntime;
  }
  return 0;
}
