#include "kcq/gst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "kcq/errors.hpp"
#include "kcq/parallel.hpp"
#include "kcq/rng.hpp"

namespace kcq {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

GateString concat(std::initializer_list<const GateString*> parts) {
  GateString out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

Ptm apply(const GateString& s, const std::map<std::string, Ptm>& gates) {
  Ptm m = Ptm::Identity();
  for (const auto& g : s) {
    const auto it = gates.find(g);
    if (it == gates.end()) throw InvalidArgument("no transfer matrix for gate label " + g);
    m = it->second * m;
  }
  return m;
}

// Residual functor with a user callback, for Eigen's numerical Jacobian.
struct Objective {
  using Scalar = double;
  using InputType = VectorXd;
  using ValueType = VectorXd;
  using JacobianType = MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::function<void(const VectorXd&, VectorXd&)> f;
  int n_in = 0, n_out = 0;

  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const VectorXd& x, VectorXd& r) const {
    f(x, r);
    return 0;
  }
};

VectorXd minimize_residuals(Objective obj, VectorXd x0, int max_evals) {
  Eigen::NumericalDiff<Objective, Eigen::Central> diff(obj);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Objective, Eigen::Central>> lm(diff);
  lm.parameters.maxfev = max_evals;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(x0);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
    throw NumericFailure("least-squares setup rejected by the optimizer");
  return x0;
}

// Trace-preserving PTMs carry 12 free entries (rows 1..3).
void pack(const Ptm& g, VectorXd& x, int offset) {
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < 4; ++c) x(offset + 4 * (r - 1) + c) = g(r, c);
}

Ptm unpack(const VectorXd& x, int offset) {
  Ptm g = Ptm::Zero();
  g(0, 0) = 1.0;
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = x(offset + 4 * (r - 1) + c);
  return g;
}

std::vector<std::string> gate_labels(const GstDesign& d) {
  std::set<std::string> labels;
  for (const auto& s : d.germs) labels.insert(s.begin(), s.end());
  for (const auto& s : d.fiducials) labels.insert(s.begin(), s.end());
  return {labels.begin(), labels.end()};
}

}  // namespace

std::string to_string(const GateString& s) {
  if (s.empty()) return "{}";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += s[i];
  }
  return out;
}

GateString parse_gate_string(const std::string& text) {
  std::istringstream in(text);
  GateString out;
  for (std::string tok; in >> tok;)
    if (tok != "{}") out.push_back(tok);
  return out;
}

GstDesign default_gst_design() {
  GstDesign d;
  d.germs = {{"Gz"},
             {"Gx"},
             {"Gy"},
             {"Gy", "Gx"},
             {"Gx", "Gz"},
             {"Gy", "Gz"},
             {"Gy", "Gx", "Gx", "Gz"},
             {"Gy", "Gy", "Gy", "Gz"},
             {"Gx", "Gz", "Gy", "Gz", "Gz"},
             {"Gx", "Gx", "Gx", "Gz"}};
  d.fiducials = {{"Gx"}, {"Gy"}, {"Gx", "Gx"}, {}};
  d.max_lengths = {0, 1, 2, 4, 8, 16, 32, 64, 128};
  return d;
}

std::vector<GstCircuit> gst_generate(const GstDesign& design) {
  std::vector<GstCircuit> out;
  std::set<GateString> seen;
  for (int L : design.max_lengths) {
    if (L < 0) throw InvalidArgument("GST max length must be non-negative");
    for (std::size_t g = 0; g < design.germs.size(); ++g) {
      const GateString& germ = design.germs[g];
      if (germ.empty()) throw InvalidArgument("GST germ is empty");
      const int reps = L / static_cast<int>(germ.size());
      GateString body;
      for (int r = 0; r < reps; ++r) body.insert(body.end(), germ.begin(), germ.end());
      for (std::size_t i = 0; i < design.fiducials.size(); ++i)
        for (std::size_t j = 0; j < design.fiducials.size(); ++j) {
          GateString s = concat({&design.fiducials[i], &body, &design.fiducials[j]});
          if (!seen.insert(s).second) continue;
          out.push_back({L, static_cast<int>(g), reps, static_cast<int>(i), static_cast<int>(j), std::move(s)});
        }
    }
  }
  return out;
}

void GateNoiseModel::validate() const {
  for (const auto& [label, g] : gates) {
    if ((g.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() > 1e-9)
      throw InvalidArgument("gate " + label + " is not trace preserving");
  }
  if (std::abs(rho(0) - 1.0) > 1e-12 || rho.tail<3>().norm() > 1.0 + 1e-9)
    throw InvalidArgument("preparation vector is not a state");
  const double p_lo = effect(0) - effect.tail<3>().norm(), p_hi = effect(0) + effect.tail<3>().norm();
  if (p_lo < -1e-9 || p_hi > 1.0 + 1e-9) throw InvalidArgument("measurement effect gives probabilities outside [0, 1]");
}

GateNoiseModel ideal_gate_set() {
  GateNoiseModel m;
  m.gates["Gx"] = rotation_ptm('x', std::numbers::pi / 2);
  m.gates["Gz"] = rotation_ptm('z', std::numbers::pi / 2);
  m.gates["Gy"] = compile_gy(m.gates["Gx"], m.gates["Gz"]);
  return m;
}

Ptm compile_gy(const Ptm& gx, const Ptm& gz) { return pauli_ptms()[1] * gz * gx * gz; }

GateNoiseModel noisy_gate_set(const ErrorGenerator& gx_error, const ErrorGenerator& gz_error) {
  GateNoiseModel m;
  m.gates["Gx"] = ptm_exp(build_error_generator(gx_error)) * rotation_ptm('x', std::numbers::pi / 2);
  m.gates["Gz"] = ptm_exp(build_error_generator(gz_error)) * rotation_ptm('z', std::numbers::pi / 2);
  m.gates["Gy"] = compile_gy(m.gates["Gx"], m.gates["Gz"]);
  return m;
}

double circuit_probability(const GateString& s, const GateNoiseModel& model) {
  Eigen::Vector4d v = model.rho;
  for (const auto& g : s) {
    const auto it = model.gates.find(g);
    if (it == model.gates.end()) throw InvalidArgument("no transfer matrix for gate label " + g);
    v = it->second * v;
  }
  const double p = model.effect.dot(v);
  if (p < -1e-9 || p > 1.0 + 1e-9) throw NumericFailure("model probability outside [0, 1] for " + to_string(s));
  return std::clamp(p, 0.0, 1.0);
}

GstDataset gst_simulate(const std::vector<GateString>& circuits, const GateNoiseModel& model, long shots,
                        std::uint64_t seed, int threads) {
  model.validate();
  if (shots < 0) throw InvalidArgument("shot count must be non-negative");
  GstDataset d;
  d.circuits = circuits;
  d.shots = shots;
  d.n0.assign(circuits.size(), 0.0);
  d.n1.assign(circuits.size(), 0.0);
  parallel_for(circuits.size(), threads, [&](std::size_t i) {
    const double p = circuit_probability(circuits[i], model);
    if (shots == 0) {
      d.n0[i] = p;
      d.n1[i] = 1.0 - p;
      return;
    }
    auto eng = rng::stream(seed, {i});
    std::binomial_distribution<long> draw(shots, p);
    const long k = draw(eng);
    d.n0[i] = static_cast<double>(k);
    d.n1[i] = static_cast<double>(shots - k);
  });
  return d;
}

std::map<std::string, Ptm> gauge_optimize(const std::map<std::string, Ptm>& estimate,
                                          const std::map<std::string, Ptm>& target) {
  std::vector<std::string> labels;
  for (const auto& [label, g] : estimate)
    if (target.count(label)) labels.push_back(label);
  if (labels.empty()) return estimate;

  auto transform = [](const VectorXd& x) {
    Ptm t = Ptm::Identity();
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < 4; ++c) t(r, c) = x(4 * (r - 1) + c);
    return t;
  };
  Objective obj;
  obj.n_in = 12;
  obj.n_out = 16 * static_cast<int>(labels.size());
  obj.f = [&](const VectorXd& x, VectorXd& r) {
    const Ptm t = transform(x);
    const Ptm ti = t.inverse();
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const Ptm d = ti * estimate.at(labels[k]) * t - target.at(labels[k]);
      r.segment(16 * k, 16) = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(d.data());
    }
  };
  VectorXd x0(12);
  pack(Ptm::Identity(), x0, 0);
  const VectorXd x = minimize_residuals(obj, x0, 4000);
  const Ptm t = transform(x);
  const Ptm ti = t.inverse();
  std::map<std::string, Ptm> out = estimate;
  for (const auto& label : labels) out[label] = ti * estimate.at(label) * t;
  return out;
}

namespace {

void refine(const GstDataset& data, const std::vector<std::string>& labels, GstEstimate& est) {
  const GateNoiseModel spam;  // ideal preparation and measurement fix the gauge
  const int nl = static_cast<int>(labels.size());
  std::unordered_map<std::string, int> index;
  for (int k = 0; k < nl; ++k) index[labels[k]] = k;
  std::vector<std::vector<int>> seqs;
  std::vector<double> freq, sw;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) {
    std::vector<int> s;
    bool usable = true;
    for (const auto& g : data.circuits[i]) {
      const auto it = index.find(g);
      if (it == index.end()) {
        usable = false;
        break;
      }
      s.push_back(it->second);
    }
    if (!usable) continue;
    seqs.push_back(std::move(s));
    const double f = data.frequency(i);
    freq.push_back(f);
    if (data.shots > 0) {
      const double n = static_cast<double>(data.shots);
      sw.push_back(std::sqrt(n / std::max(f * (1.0 - f), 1.0 / n)));
    } else {
      sw.push_back(1.0);
    }
  }

  // Fit progressively longer circuits, each stage starting from the last,
  // so the short sequences pin the estimate before germ powers amplify any
  // error in the starting point.
  std::size_t longest = 0;
  for (const auto& s : seqs) longest = std::max(longest, s.size());
  VectorXd x(12 * nl);
  for (int k = 0; k < nl; ++k) pack(est.gates.at(labels[k]), x, 12 * k);
  for (std::size_t limit = 5;; limit = 2 * limit - 4) {
    std::vector<std::size_t> use;
    for (std::size_t c = 0; c < seqs.size(); ++c)
      if (seqs[c].size() <= limit) use.push_back(c);
    Objective obj;
    obj.n_in = 12 * nl;
    obj.n_out = static_cast<int>(use.size());
    obj.f = [&](const VectorXd& p, VectorXd& r) {
      std::vector<Ptm> g(nl);
      for (int k = 0; k < nl; ++k) g[k] = unpack(p, 12 * k);
      for (std::size_t u = 0; u < use.size(); ++u) {
        Eigen::Vector4d v = spam.rho;
        for (int k : seqs[use[u]]) v = g[k] * v;
        r(u) = sw[use[u]] * (spam.effect.dot(v) - freq[use[u]]);
      }
    };
    if (obj.n_out >= obj.n_in) x = minimize_residuals(obj, x, 200 * obj.n_in);
    if (limit >= longest) {
      VectorXd r(obj.n_out);
      obj.f(x, r);
      est.chi2 = r.squaredNorm();
      break;
    }
  }
  for (int k = 0; k < nl; ++k) est.gates[labels[k]] = unpack(x, 12 * k);
  est.refined = true;
}

}  // namespace

GstEstimate lgst_estimate(const GstDataset& data, const GstOptions& opt) {
  const auto& fid = opt.design.fiducials;
  if (fid.size() != 4) throw InvalidArgument("linear inversion needs exactly four fiducials");
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) lookup.emplace(to_string(data.circuits[i]), i);
  auto freq = [&](const GateString& s) {
    const auto it = lookup.find(to_string(s));
    if (it == lookup.end()) throw InvalidArgument("dataset lacks circuit " + to_string(s));
    return data.frequency(it->second);
  };
  auto probe = [&](const GateString& germ) {
    Ptm d;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) d(j, i) = freq(concat({&fid[i], &germ, &fid[j]}));
    return d;
  };

  const GateNoiseModel ideal = ideal_gate_set();
  Ptm r_ideal;
  for (int i = 0; i < 4; ++i) r_ideal.col(i) = apply(fid[i], ideal.gates) * ideal.rho;

  GstEstimate est;
  const Ptm gram = probe({});
  const Eigen::Vector4d sv = gram.jacobiSvd().singularValues();
  est.gram_condition = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  if (!(est.gram_condition < 1e10)) {
    std::ostringstream msg;
    msg << "fiducial Gram matrix is singular (condition number " << est.gram_condition << ")";
    throw NumericFailure(msg.str());
  }
  const Ptm gram_inv = gram.inverse();
  const Ptm r_inv = r_ideal.inverse();
  const auto labels = gate_labels(opt.design);
  for (const auto& label : labels) est.gates[label] = r_ideal * gram_inv * probe({label}) * r_inv;

  if (opt.gauge_optimize) est.gates = gauge_optimize(est.gates, ideal.gates);
  if (opt.refine) {
    refine(data, labels, est);
    est.gates = gauge_optimize(est.gates, ideal.gates);
  }
  return est;
}

GeneratorFit gate_error_generator(const Ptm& estimate, const Ptm& ideal) {
  return decompose_generator(ptm_log(estimate * ideal.inverse()));
}

}  // namespace kcq
