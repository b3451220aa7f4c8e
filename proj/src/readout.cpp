#include "kcq/readout.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "kcq/errors.hpp"
#include "kcq/rng.hpp"

namespace kcq {

void CqrParams::validate() const {
  for (double v : {eps_cqr, kappa_r, t_read, alpha, noise_sigma, flip_prob_per_read})
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("readout parameters must be finite and >= 0");
  if (!(alpha > 0.0)) throw InvalidArgument("readout alpha must be > 0");
  if (flip_prob_per_read > 0.5) throw InvalidArgument("flip_prob_per_read must be <= 0.5");
}

cplx cqr_steady_state(const CqrParams& c, cplx a_expect) {
  if (c.kappa_r == 0.0) throw NumericFailure("cqr_steady_state: kappa_r = 0 has no steady state");
  return 2.0 * c.eps_cqr / c.kappa_r * a_expect;
}

std::vector<cplx> cqr_transient(const CqrParams& c, cplx a_expect, const std::vector<double>& t_grid) {
  const cplx drive = cplx(0.0, -c.eps_cqr) * a_expect;
  std::vector<cplx> b;
  b.reserve(t_grid.size());
  for (double t : t_grid) {
    if (c.kappa_r == 0.0) {
      b.push_back(drive * t);
    } else {
      b.push_back(drive * (2.0 / c.kappa_r) * -std::expm1(-0.5 * c.kappa_r * t));
    }
  }
  return b;
}

ReadoutRun qndness_from_labels(const std::vector<int>& labels) {
  ReadoutRun r;
  long same_plus = 0, same_minus = 0;
  for (std::size_t k = 0; k + 1 < labels.size(); ++k) {
    if (labels[k] > 0) {
      ++r.pairs_plus;
      same_plus += labels[k + 1] > 0;
    } else {
      ++r.pairs_minus;
      same_minus += labels[k + 1] < 0;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.p_plus_given_plus = r.pairs_plus ? static_cast<double>(same_plus) / r.pairs_plus : nan;
  r.p_minus_given_minus = r.pairs_minus ? static_cast<double>(same_minus) / r.pairs_minus : nan;
  if (r.pairs_plus && r.pairs_minus) {
    r.qndness = 0.5 * (r.p_plus_given_plus + r.p_minus_given_minus);
  } else {
    r.qndness = r.pairs_plus ? r.p_plus_given_plus : r.p_minus_given_minus;
  }
  return r;
}

ReadoutRun simulate_readout(const CqrParams& c, int true_state, long shots, std::uint64_t seed) {
  c.validate();
  if (true_state != 1 && true_state != -1) throw InvalidArgument("true_state must be +1 or -1");
  if (shots < 2) throw InvalidArgument("simulate_readout needs at least 2 shots");
  const cplx b_ss = cqr_steady_state(c, c.alpha);
  const cplx rotate = std::abs(b_ss) > 0.0 ? std::conj(b_ss) / std::abs(b_ss) : cplx(1.0, 0.0);

  std::vector<ReadoutRecord> records(shots);
  std::vector<int> labels(shots);
  int state = true_state;
  for (long k = 0; k < shots; ++k) {
    auto gen = rng::stream(seed, {static_cast<std::uint64_t>(k)});
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double nr = noise(gen), ni = noise(gen);
    ReadoutRecord& rec = records[k];
    rec.state = state;
    rec.pointer = static_cast<double>(state) * b_ss + c.noise_sigma * cplx(nr, ni);
    rec.label = (rec.pointer * rotate).real() >= 0.0 ? 1 : -1;
    labels[k] = rec.label;
    if (u(gen) < c.flip_prob_per_read) state = -state;
  }
  ReadoutRun run = qndness_from_labels(labels);
  run.records = std::move(records);
  return run;
}

double misread_probability(const CqrParams& c) {
  c.validate();
  const double b = std::abs(cqr_steady_state(c, c.alpha));
  if (c.noise_sigma == 0.0) return b > 0.0 ? 0.0 : 0.5;
  return 0.5 * std::erfc(b / (c.noise_sigma * std::sqrt(2.0)));
}

double qndness_markov(double flip_prob, double misread, int true_state, long shots) {
  if (shots < 2) throw InvalidArgument("qndness_markov needs at least 2 shots");
  const double f = flip_prob, e = misread;
  // Joint label probabilities of one consecutive pair given the first state.
  const double same_state = (1.0 - f), other_state = f;
  const double pp_given_plus = same_state * (1 - e) * (1 - e) + other_state * (1 - e) * e;
  const double mm_given_plus = same_state * e * e + other_state * e * (1 - e);
  const double p_first_plus_given_plus = 1 - e;
  double n_pp = 0, n_mm = 0, n_p = 0, n_m = 0;
  double pi = true_state > 0 ? 1.0 : 0.0;  // P(state = + at read k)
  for (long k = 0; k + 1 < shots; ++k) {
    // By symmetry the "given minus" terms swap the roles of + and -.
    n_pp += pi * pp_given_plus + (1 - pi) * mm_given_plus;
    n_mm += pi * mm_given_plus + (1 - pi) * pp_given_plus;
    n_p += pi * p_first_plus_given_plus + (1 - pi) * e;
    n_m += pi * e + (1 - pi) * p_first_plus_given_plus;
    pi = pi * (1 - f) + (1 - pi) * f;
  }
  const bool has_p = n_p > 1e-300, has_m = n_m > 1e-300;
  if (has_p && has_m) return 0.5 * (n_pp / n_p + n_mm / n_m);
  return has_p ? n_pp / n_p : n_mm / n_m;
}

double flip_prob_from_tz(double t_read, double T_z) {
  if (!(t_read >= 0.0) || !(T_z > 0.0)) throw InvalidArgument("flip_prob_from_tz needs t_read >= 0 and T_z > 0");
  return std::min(0.5, t_read / (2.0 * T_z));
}

}  // namespace kcq
