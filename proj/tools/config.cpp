#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace kcq::cli {

using nlohmann::json;

double Units::rate(double per_us) const { return per_us / (2.0 * std::numbers::pi * kerr_mhz); }
double Units::time(double us) const { return us * 2.0 * std::numbers::pi * kerr_mhz; }
double Units::to_us(double t) const { return t / (2.0 * std::numbers::pi * kerr_mhz); }

namespace {

struct Node {
  const json* j = nullptr;
  std::string path;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  void error(const std::string& path, const std::string& msg) {
    std::ostringstream os;
    os << "config";
    if (const int line = line_of(path)) os << ":" << line;
    os << ": " << (path.empty() ? "/" : path) << ": " << msg;
    errors_.push_back(os.str());
  }
  void expect(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) error(path, msg);
  }
  const std::vector<std::string>& errors() const { return errors_; }

  Node child(const Node& n, const std::string& key) {
    const std::string path = n.path + "/" + key;
    seen_.insert(path);
    if (!n.j || !n.j->contains(key)) return {nullptr, path};
    const json& c = (*n.j)[key];
    if (!c.is_object()) {
      error(path, "expected an object");
      return {nullptr, path};
    }
    return {&c, path};
  }

  const json* member(const Node& n, const std::string& key) {
    seen_.insert(n.path + "/" + key);
    if (!n.j || !n.j->contains(key)) return nullptr;
    const json& v = (*n.j)[key];
    return v.is_null() ? nullptr : &v;
  }

  bool has(const Node& n, const std::string& key) { return member(n, key) != nullptr; }

  double number(const Node& n, const std::string& key, double def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      error(n.path + "/" + key, "expected a finite number");
      return def;
    }
    return v->get<double>();
  }

  long integer(const Node& n, const std::string& key, long def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_number_integer()) {
      error(n.path + "/" + key, "expected an integer");
      return def;
    }
    return v->get<long>();
  }

  std::uint64_t unsigned_integer(const Node& n, const std::string& key, std::uint64_t def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_number_unsigned()) {
      error(n.path + "/" + key, "expected a non-negative integer");
      return def;
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const Node& n, const std::string& key, bool def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_boolean()) {
      error(n.path + "/" + key, "expected true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string string(const Node& n, const std::string& key, const std::string& def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_string()) {
      error(n.path + "/" + key, "expected a string");
      return def;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const Node& n, const std::string& key, const std::vector<double>& def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_array()) {
      error(n.path + "/" + key, "expected an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        error(n.path + "/" + key + "/" + std::to_string(i), "expected a finite number");
        return def;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const Node& n, const std::string& key, const std::vector<int>& def) {
    const json* v = member(n, key);
    if (!v) return def;
    if (!v->is_array()) {
      error(n.path + "/" + key, "expected an array of integers");
      return def;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number_integer()) {
        error(n.path + "/" + key + "/" + std::to_string(i), "expected an integer");
        return def;
      }
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::array<double, 3> triple(const Node& n, const std::string& key, std::array<double, 3> def) {
    const std::vector<double> v = numbers(n, key, {def.begin(), def.end()});
    if (v.size() != 3) {
      error(n.path + "/" + key, "expected exactly three numbers (x, y, z)");
      return def;
    }
    return {v[0], v[1], v[2]};
  }

  /// Reports members of `j` that no reader asked for.
  void check_unknown(const json& j, const std::string& path) {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string p = path + "/" + it.key();
      if (!seen_.count(p)) {
        error(p, "unknown key");
      } else if (it.value().is_object()) {
        check_unknown(it.value(), p);
      }
    }
  }

 private:
  // Best-effort source line of a JSON pointer: finds each quoted key in
  // turn after the previous one.
  int line_of(const std::string& path) const {
    if (text_.empty() || path.empty()) return 0;
    std::size_t pos = 0;
    std::size_t start = 1;
    bool found_any = false;
    while (start <= path.size()) {
      const std::size_t end = path.find('/', start);
      const std::string part = path.substr(start, end == std::string::npos ? std::string::npos : end - start);
      start = end == std::string::npos ? path.size() + 1 : end + 1;
      if (part.empty() || part.find_first_not_of("0123456789") == std::string::npos) continue;
      const std::size_t at = text_.find("\"" + part + "\"", pos);
      if (at == std::string::npos) break;
      pos = at + 1;
      found_any = true;
    }
    if (!found_any) return 0;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  const std::string& text_;
  std::set<std::string> seen_;
  std::vector<std::string> errors_;
};

std::vector<double> range(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

DrbMode parse_mode(Reader& r, const Node& n, const std::string& key, DrbMode def) {
  const std::string def_name = def == DrbMode::sampled ? "sampled" : def == DrbMode::analytic ? "analytic" : "exact";
  const std::string s = r.string(n, key, def_name);
  if (s == "sampled") return DrbMode::sampled;
  if (s == "analytic") return DrbMode::analytic;
  if (s == "exact") return DrbMode::exact;
  r.error(n.path + "/" + key, "expected \"sampled\", \"analytic\" or \"exact\"");
  return def;
}

ErrorGenerator parse_generator(Reader& r, const Node& n) {
  ErrorGenerator g;
  g.h = r.triple(n, "h", {0.0, 0.0, 0.0});
  g.p = r.triple(n, "p", {0.0, 0.0, 0.0});
  for (int m = 0; m < 3; ++m) r.expect(g.p[m] >= 0.0, n.path + "/p", "stochastic rates must be >= 0");
  return g;
}

void check_positive_grid(Reader& r, const std::vector<double>& v, const std::string& path, bool allow_zero) {
  r.expect(!v.empty(), path, "grid must not be empty");
  for (double x : v) {
    if (allow_zero ? x < 0.0 : x <= 0.0) {
      r.error(path, allow_zero ? "values must be >= 0" : "values must be > 0");
      return;
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json doc = json::object();
  if (!text.empty()) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config:1: /: the document must be a JSON object");
  }

  Reader r(text);
  ExperimentConfig cfg;
  const Node root{&doc, ""};
  cfg.seed = r.unsigned_integer(root, "seed", 1);
  if (seed_override) cfg.seed = *seed_override;

  const Node units = r.child(root, "units");
  cfg.units.kerr_mhz = r.number(units, "kerr_mhz", 1.2);
  r.expect(cfg.units.kerr_mhz > 0.0, units.path + "/kerr_mhz", "must be > 0");
  if (!(cfg.units.kerr_mhz > 0.0)) cfg.units.kerr_mhz = 1.2;
  const Units& u = cfg.units;

  // Hamiltonian, in units of K.
  const Node sys = r.child(root, "system");
  cfg.system.delta = r.number(sys, "delta_over_k", 2.0);
  const bool has_eps2 = r.has(sys, "eps2_over_k"), has_nbar = r.has(sys, "mean_photon");
  r.expect(!(has_eps2 && has_nbar), sys.path, "give either eps2_over_k or mean_photon, not both");
  if (has_nbar) {
    const double nbar = r.number(sys, "mean_photon", 5.2);
    r.expect(nbar > 0.0, sys.path + "/mean_photon", "must be > 0");
    cfg.system.eps2 = nbar - cfg.system.delta / 2.0;
  } else {
    cfg.system.eps2 = r.number(sys, "eps2_over_k", 4.2);
  }
  r.expect(cfg.system.eps2 + cfg.system.delta / 2.0 > 0.0, sys.path, "eps2 + delta/2 must be > 0");
  cfg.system.dim = static_cast<int>(r.integer(sys, "dim", 0));
  r.expect(cfg.system.dim == 0 || cfg.system.dim >= 3, sys.path + "/dim", "must be 0 (automatic) or >= 3");

  // Dissipation.
  const Node noise = r.child(root, "noise");
  const bool has_t1 = r.has(noise, "t1_us"), has_k1 = r.has(noise, "kappa1_per_us");
  r.expect(!(has_t1 && has_k1), noise.path, "give either t1_us or kappa1_per_us, not both");
  if (has_k1) {
    const double k1 = r.number(noise, "kappa1_per_us", 0.0);
    r.expect(k1 >= 0.0, noise.path + "/kappa1_per_us", "must be >= 0");
    cfg.noise.kappa1 = u.rate(k1);
  } else {
    const double t1 = r.number(noise, "t1_us", 40.0);
    r.expect(t1 > 0.0, noise.path + "/t1_us", "must be > 0");
    cfg.noise.kappa1 = t1 > 0.0 ? u.rate(1.0 / t1) : 0.0;
  }
  cfg.noise.n_th = r.number(noise, "n_th", 0.04);
  r.expect(cfg.noise.n_th >= 0.0 && cfg.noise.n_th < 0.5, noise.path + "/n_th", "must be in [0, 0.5)");
  const double k2 = r.number(noise, "kappa2_per_us", 7.0);
  r.expect(k2 >= 0.0, noise.path + "/kappa2_per_us", "must be >= 0");
  cfg.noise.kappa2 = u.rate(k2);
  const double kphi = r.number(noise, "kappa_phi_per_us", 1e-4);
  r.expect(kphi >= 0.0, noise.path + "/kappa_phi_per_us", "must be >= 0");
  cfg.noise.kappa_phi = u.rate(kphi);
  const double xi = r.number(noise, "xi_mhz", 0.04);
  r.expect(xi >= 0.0, noise.path + "/xi_mhz", "must be >= 0");
  cfg.noise.xi = u.freq(xi);

  {
    const Node n = r.child(root, "spectrum");
    cfg.spectrum.delta = r.numbers(n, "delta_over_k", cfg.spectrum.delta);
    r.expect(!cfg.spectrum.delta.empty(), n.path + "/delta_over_k", "grid must not be empty");
    cfg.spectrum.opt.levels = static_cast<int>(r.integer(n, "levels", 8));
    r.expect(cfg.spectrum.opt.levels >= 2 && cfg.spectrum.opt.levels % 2 == 0, n.path + "/levels",
             "must be an even number >= 2");
    cfg.spectrum.opt.threshold = r.number(n, "threshold_over_k", 1e-2);
    r.expect(cfg.spectrum.opt.threshold > 0.0, n.path + "/threshold_over_k", "must be > 0");
    cfg.spectrum.opt.dim = cfg.system.dim;
  }

  {
    const Node n = r.child(root, "lifetimes");
    auto& c = cfg.lifetimes;
    c.mean_photon = r.number(n, "mean_photon", 5.2);
    r.expect(c.mean_photon > 0.0, n.path + "/mean_photon", "must be > 0");
    c.delta = r.numbers(n, "delta_over_k", c.delta);
    r.expect(!c.delta.empty(), n.path + "/delta_over_k", "grid must not be empty");
    for (double d : c.delta)
      r.expect(c.mean_photon - d / 2.0 > 0.0, n.path + "/delta_over_k", "every delta needs eps2 = <n> - delta/2 > 0");
    const double t_max = r.number(n, "t_max_us", 0.0);
    r.expect(t_max >= 0.0, n.path + "/t_max_us", "must be >= 0 (0 selects the window automatically)");
    c.t_max = u.time(t_max);
    c.opt.n_points = static_cast<int>(r.integer(n, "n_points", 81));
    r.expect(c.opt.n_points >= 5, n.path + "/n_points", "must be >= 5");
    c.opt.levels = static_cast<int>(r.integer(n, "levels", 16));
    r.expect(c.opt.levels >= 2, n.path + "/levels", "must be >= 2");
    c.opt.n_samples = static_cast<int>(r.integer(n, "xi_samples", 64));
    r.expect(c.opt.n_samples >= 1, n.path + "/xi_samples", "must be >= 1");
    c.bit_flip = r.boolean(n, "bit_flip", true);
    c.phase_flip = r.boolean(n, "phase_flip", true);
  }

  {
    const Node n = r.child(root, "init");
    auto& c = cfg.init;
    const double ramp = r.number(n, "ramp_us", 2.0);
    r.expect(ramp > 0.0, n.path + "/ramp_us", "must be > 0");
    c.ramp_time = u.time(ramp);
    const double relax = r.number(n, "relax_us", 50.0);
    r.expect(relax >= 0.0, n.path + "/relax_us", "must be >= 0");
    c.relax_time = u.time(relax);
    c.opt.ramp_points = static_cast<int>(r.integer(n, "ramp_points", 41));
    c.opt.relax_points = static_cast<int>(r.integer(n, "relax_points", 41));
    r.expect(c.opt.ramp_points >= 2, n.path + "/ramp_points", "must be >= 2");
    r.expect(c.opt.relax_points >= 2, n.path + "/relax_points", "must be >= 2");
    c.opt.levels = static_cast<int>(r.integer(n, "levels", 20));
    r.expect(c.opt.levels >= 2, n.path + "/levels", "must be >= 2");
    c.opt.steepness = r.number(n, "steepness", 3.0);
    r.expect(c.opt.steepness > 0.0, n.path + "/steepness", "must be > 0");
  }

  {
    const Node n = r.child(root, "chevron");
    auto& c = cfg.chevron;
    const Node x = r.child(n, "x");
    c.run_x = r.boolean(x, "enabled", true);
    c.excited = r.boolean(x, "excited", false);
    std::vector<double> d0 = r.numbers(x, "delta0_mhz", range(0.0, 19.2, 17));
    std::vector<double> tg = r.numbers(x, "t_gate_us", {0.53, 0.8, 1.06, 1.33});
    check_positive_grid(r, d0, x.path + "/delta0_mhz", true);
    check_positive_grid(r, tg, x.path + "/t_gate_us", false);
    for (double v : d0) c.delta0.push_back(u.freq(v));
    for (double v : tg) c.t_gate.push_back(u.time(v));

    const Node z = r.child(n, "z");
    c.run_z = r.boolean(z, "enabled", true);
    const double om = r.number(z, "omega_mhz", 0.024);
    r.expect(om > 0.0, z.path + "/omega_mhz", "must be > 0");
    c.omega_abs = u.freq(om);
    c.phase = r.numbers(z, "phase_rad", range(-std::numbers::pi, std::numbers::pi, 9));
    r.expect(!c.phase.empty(), z.path + "/phase_rad", "grid must not be empty");
    std::vector<double> dur = r.numbers(z, "duration_us", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
    check_positive_grid(r, dur, z.path + "/duration_us", true);
    for (double v : dur) c.duration.push_back(u.time(v));

    const Node o = r.child(n, "optimize");
    c.optimize = r.boolean(o, "enabled", true);
    std::vector<double> od = r.numbers(o, "delta0_mhz", {9.6, 12.0, 14.4});
    std::vector<double> ot = r.numbers(o, "t_gate_us", {0.8, 1.06});
    check_positive_grid(r, od, o.path + "/delta0_mhz", true);
    check_positive_grid(r, ot, o.path + "/t_gate_us", false);
    for (double v : od) c.opt_delta0.push_back(u.freq(v));
    for (double v : ot) c.opt_t_gate.push_back(u.time(v));
  }

  {
    // Readout rates stay in the laboratory units; only ratios and kappa t
    // enter the pointer model.
    const Node n = r.child(root, "readout");
    auto& c = cfg.readout;
    const double two_pi = 2.0 * std::numbers::pi;
    c.cqr.eps_cqr = two_pi * r.number(n, "eps_cqr_mhz", 0.1);
    c.cqr.kappa_r = two_pi * r.number(n, "kappa_r_mhz", 0.4);
    c.cqr.t_read = r.number(n, "t_read_us", 2.0);
    c.cqr.alpha = std::sqrt(cfg.system.eps2 + cfg.system.delta / 2.0);
    c.cqr.noise_sigma = r.number(n, "noise_sigma", 0.2);
    const bool has_f = r.has(n, "flip_prob_per_read"), has_tz = r.has(n, "t_z_us");
    r.expect(!(has_f && has_tz), n.path, "give either flip_prob_per_read or t_z_us, not both");
    if (has_tz) {
      const double tz = r.number(n, "t_z_us", 1.0);
      r.expect(tz > 0.0, n.path + "/t_z_us", "must be > 0");
      if (tz > 0.0 && c.cqr.t_read >= 0.0) c.cqr.flip_prob_per_read = flip_prob_from_tz(c.cqr.t_read, tz);
    } else {
      c.cqr.flip_prob_per_read = r.number(n, "flip_prob_per_read", 0.005);
    }
    try {
      c.cqr.validate();
    } catch (const std::exception& e) {
      r.error(n.path, e.what());
    }
    r.expect(c.cqr.kappa_r > 0.0, n.path + "/kappa_r_mhz", "must be > 0");
    c.shots = r.integer(n, "shots", 10000);
    r.expect(c.shots >= 2, n.path + "/shots", "must be >= 2");
    c.true_state = static_cast<int>(r.integer(n, "true_state", 1));
    r.expect(c.true_state == 1 || c.true_state == -1, n.path + "/true_state", "must be +1 or -1");
  }

  {
    const Node n = r.child(root, "twirl");
    cfg.twirl.h = r.triple(n, "h", {0.0038, 0.0, 0.0});
    cfg.twirl.p = r.triple(n, "p", {0.0, 0.0, 0.0});
    for (double p : cfg.twirl.p) r.expect(p >= 0.0, n.path + "/p", "stochastic rates must be >= 0");
  }

  {
    const Node n = r.child(root, "drb");
    auto& c = cfg.drb;
    c.opt.depths = r.integers(n, "depths", {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048});
    r.expect(c.opt.depths.size() >= 3, n.path + "/depths", "need at least three depths");
    for (int d : c.opt.depths) r.expect(d >= 1, n.path + "/depths", "depths must be >= 1");
    c.opt.samples = static_cast<int>(r.integer(n, "samples", 50));
    r.expect(c.opt.samples >= 1, n.path + "/samples", "must be >= 1");
    c.opt.shots = r.integer(n, "shots", 1024);
    r.expect(c.opt.shots >= 1, n.path + "/shots", "must be >= 1");
    c.opt.mode = parse_mode(r, n, "mode", DrbMode::sampled);

    const Node nn = r.child(n, "noise");
    const auto zp = r.triple(nn, "z_pauli", {5e-5, 5e-5, 4e-3});
    const auto zh = r.triple(nn, "z_coherent", {0.0, 0.0, 0.0});
    const auto xp = r.triple(nn, "x_pauli", {0.0, 0.0, 0.0});
    for (double p : zp) r.expect(p >= 0.0 && p <= 1.0, nn.path + "/z_pauli", "probabilities must be in [0, 1]");
    for (double p : xp) r.expect(p >= 0.0 && p <= 1.0, nn.path + "/x_pauli", "probabilities must be in [0, 1]");
    r.expect(zp[0] + zp[1] + zp[2] <= 1.0, nn.path + "/z_pauli", "probabilities must sum to <= 1");
    r.expect(xp[0] + xp[1] + xp[2] <= 1.0, nn.path + "/x_pauli", "probabilities must sum to <= 1");
    ErrorGenerator coherent;
    coherent.h = zh;
    c.noise.z_noise = pauli_channel(zp[0], zp[1], zp[2]) * ptm_exp(build_error_generator(coherent));
    c.noise.x_noise = pauli_channel(xp[0], xp[1], xp[2]);
    c.noise.identity_is_noisy = r.boolean(nn, "identity_is_noisy", true);
    c.noise.prep_error = r.number(nn, "prep_error", 0.0);
    c.noise.meas_error = r.number(nn, "meas_error", 0.0);
    r.expect(c.noise.prep_error >= 0.0 && c.noise.prep_error <= 0.5, nn.path + "/prep_error", "must be in [0, 0.5]");
    r.expect(c.noise.meas_error >= 0.0 && c.noise.meas_error <= 0.5, nn.path + "/meas_error", "must be in [0, 0.5]");

    const Node f = r.child(n, "fit");
    c.fit.scale_bit = r.number(f, "scale_bit", 1.07);
    c.fit.scale_ph = r.number(f, "scale_ph", 1.02);
    r.expect(c.fit.scale_bit > 0.0, f.path + "/scale_bit", "must be > 0");
    r.expect(c.fit.scale_ph > 0.0, f.path + "/scale_ph", "must be > 0");
    c.fit.simple_phase = r.boolean(f, "simple_phase", false);

    const Node cal = r.child(n, "calibration");
    c.cal_grid = r.numbers(cal, "grid", {0.0025, 0.005, 0.0075, 0.01, 0.0125, 0.015});
    bool any = false;
    for (double p : c.cal_grid) {
      r.expect(p >= 0.0 && p <= 0.03, cal.path + "/grid", "values must be in [0, 0.03]");
      any |= p > 0.0;
    }
    r.expect(any, cal.path + "/grid", "needs at least one nonzero error rate");
    c.cal.bit_ratio = r.number(cal, "bit_ratio", 0.02);
    r.expect(c.cal.bit_ratio >= 0.0 && c.cal.bit_ratio <= 1.0, cal.path + "/bit_ratio", "must be in [0, 1]");
    c.cal.depths = r.integers(cal, "depths", c.cal.depths);
    r.expect(c.cal.depths.size() >= 3, cal.path + "/depths", "need at least three depths");
    for (int d : c.cal.depths) r.expect(d >= 1, cal.path + "/depths", "depths must be >= 1");
    c.cal.samples = static_cast<int>(r.integer(cal, "samples", 50));
    r.expect(c.cal.samples >= 1, cal.path + "/samples", "must be >= 1");
    c.cal.shots = r.integer(cal, "shots", 1024);
    r.expect(c.cal.shots >= 1, cal.path + "/shots", "must be >= 1");
    c.cal.mode = parse_mode(r, cal, "mode", DrbMode::analytic);
  }

  {
    const Node n = r.child(root, "gst");
    auto& c = cfg.gst;
    c.shots = r.integer(n, "shots", 1024);
    r.expect(c.shots >= 1, n.path + "/shots", "must be >= 1");
    c.gx = parse_generator(r, r.child(n, "gx_error"));
    const Node gz = r.child(n, "gz_error");
    c.gz = parse_generator(r, gz);
    if (!r.has(gz, "p") && !r.has(gz, "h")) {
      c.gz.p = {0.0, 0.0, 0.008};
      c.gz.h = {0.0, 0.0, 0.004};
    }
    c.opt.gauge_optimize = r.boolean(n, "gauge_optimize", true);
    c.opt.refine = r.boolean(n, "refine", true);
  }

  r.check_unknown(doc, "");
  if (!r.errors().empty()) {
    std::string msg;
    for (const auto& e : r.errors()) msg += e + "\n";
    msg.pop_back();
    throw ConfigError(msg);
  }
  cfg.source = doc;
  cfg.source["seed"] = cfg.seed;
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  if (path.empty()) return parse_config("", seed_override);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = cfg.source.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kcq::cli
