#include "kcq/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <unsupported/Eigen/NonLinearOptimization>

#include "kcq/errors.hpp"

namespace kcq {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool lm_succeeded(int status) {
  using namespace Eigen::LevenbergMarquardtSpace;
  return status == RelativeReductionTooSmall || status == RelativeErrorTooSmall ||
         status == RelativeErrorAndReductionTooSmall || status == CosinusTooSmall ||
         status == FtolTooSmall || status == XtolTooSmall || status == GtolTooSmall;
}

// Residual functor in the shape Eigen's LM expects.
template <class Model>
struct Residuals {
  using Scalar = double;
  using InputType = VectorXd;
  using ValueType = VectorXd;
  using JacobianType = MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>& x;
  const std::vector<double>& y;
  const std::vector<double>& sw;  // sqrt of weights
  int n_params;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const VectorXd& p, VectorXd& r) const {
    for (int i = 0; i < values(); ++i) r(i) = sw[i] * (Model::value(p, x[i]) - y[i]);
    return 0;
  }
  int df(const VectorXd& p, MatrixXd& j) const {
    for (int i = 0; i < values(); ++i) j.row(i) = sw[i] * Model::gradient(p, x[i]).transpose();
    return 0;
  }
};

struct DecayModel {  // p = (A, r, C), y = A exp(-r t) + C
  static double value(const VectorXd& p, double t) { return p(0) * std::exp(-p(1) * t) + p(2); }
  static VectorXd gradient(const VectorXd& p, double t) {
    const double e = std::exp(-p(1) * t);
    VectorXd g(3);
    g << e, -p(0) * t * e, 1.0;
    return g;
  }
};

struct PowerModel {  // p = (A, lambda), y = A lambda^n
  static double value(const VectorXd& p, double n) { return p(0) * std::pow(p(1), n); }
  static VectorXd gradient(const VectorXd& p, double n) {
    VectorXd g(2);
    g << std::pow(p(1), n), n == 0.0 ? 0.0 : p(0) * n * std::pow(p(1), n - 1.0);
    return g;
  }
};

template <class Model>
VectorXd least_squares(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sw,
                       VectorXd p, MatrixXd& cov, double& chi2,
                       const std::function<bool(const VectorXd&)>& accept_unconverged = nullptr) {
  Residuals<Model> fn{x, y, sw, static_cast<int>(p.size())};
  Eigen::LevenbergMarquardt<Residuals<Model>> lm(fn);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 4000;
  const int status = lm.minimize(p);
  VectorXd r(fn.values());
  fn(p, r);
  const bool ok = lm_succeeded(status) || (accept_unconverged && p.allFinite() && accept_unconverged(p));
  if (!ok || !p.allFinite())
    throw FitFailure("least-squares fit did not converge (status " + std::to_string(status) + ")",
                     std::vector<double>(r.data(), r.data() + r.size()));
  MatrixXd j(fn.values(), fn.inputs());
  fn.df(p, j);
  chi2 = r.squaredNorm();
  const MatrixXd jtj = j.transpose() * j;
  Eigen::FullPivLU<MatrixXd> lu(jtj);
  cov = lu.isInvertible() ? MatrixXd(lu.inverse())
                          : MatrixXd::Constant(p.size(), p.size(), std::numeric_limits<double>::infinity());
  return p;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y) {
  const int n = static_cast<int>(t.size());
  if (n != static_cast<int>(y.size())) throw InvalidArgument("fit_decay: size mismatch");
  if (n < 4) throw InvalidArgument("fit_decay needs at least 4 points");
  const double window = t.back() - t.front();
  if (!(window > 0.0)) throw InvalidArgument("fit_decay: times must span a positive window");

  DecayFit out;
  out.n_points = n;
  const double y0 = y.front(), y1 = y.back();
  auto sentinel = [&](double A, double C) {
    out.A = A;
    out.C = C;
    out.T = std::numeric_limits<double>::infinity();
    out.sigma_T = std::numeric_limits<double>::infinity();
    out.lower_bound = true;
    out.T_lower = 1e4 * window;
    return out;
  };
  double span = 0.0;
  for (double v : y) span = std::max(span, std::abs(v - y0));
  if (span < 1e-10 * std::max(1.0, std::abs(y0))) return sentinel(0.0, y0);

  // Initial guess: A = first - last, C = last, rate from a log-linear
  // regression over the first decade of the window.
  double A0 = y0 - y1, C0 = y1;
  double rate = 3.0 / window;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < n && t[i] - t.front() <= 0.1 * window + 1e-300; ++i) {
      const double d = (y[i] - C0) / A0;
      if (!(d > 1e-12)) continue;
      const double l = std::log(d);
      sx += t[i];
      sy += l;
      sxx += t[i] * t[i];
      sxy += t[i] * l;
      ++m;
    }
    if (m >= 2) {
      const double den = m * sxx - sx * sx;
      if (den > 0.0) {
        const double slope = (m * sxy - sx * sy) / den;
        if (slope < 0.0 && std::isfinite(slope)) rate = -slope;
      }
    }
  }
  // For fixed rate the model is linear in (A, C); the profiled residual is
  // scanned on a log grid so nearly flat or nearly linear data cannot strand
  // the nonlinear solver. The log-linear guess competes with the scan.
  auto profile = [&](double r, double& A, double& C) {
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      m(i, 0) = std::exp(-r * t[i]);
      m(i, 1) = 1.0;
      v(i) = y[i];
    }
    const Eigen::Vector2d ac = m.colPivHouseholderQr().solve(v);
    A = ac(0);
    C = ac(1);
    return (m * ac - v).squaredNorm();
  };
  double bestA = A0, bestC = C0;
  double best_ssr = profile(rate, bestA, bestC);
  for (int k = 0; k <= 180; ++k) {
    const double r = std::pow(10.0, -6.0 + 9.0 * k / 180.0) / window;
    double A, C;
    const double ssr = profile(r, A, C);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      rate = r;
      bestA = A;
      bestC = C;
    }
  }
  if (rate * window < 1e-4) return sentinel(bestA, bestC);
  const std::vector<double> sw(n, 1.0);
  VectorXd p(3);
  p << bestA, rate, bestC;
  MatrixXd cov;
  double chi2 = 0.0;
  p = least_squares<DecayModel>(t, y, sw, p, cov, chi2,
                                [&](const VectorXd& q) { return q(1) * window < 1e-4; });
  if (p(1) * window < 1e-4) return sentinel(p(0), p(2));
  const double s2 = n > 3 ? chi2 / (n - 3) : 0.0;
  out.A = p(0);
  out.C = p(2);
  out.T = 1.0 / p(1);
  out.sigma_A = std::sqrt(std::max(0.0, s2 * cov(0, 0)));
  out.sigma_C = std::sqrt(std::max(0.0, s2 * cov(2, 2)));
  out.sigma_T = std::sqrt(std::max(0.0, s2 * cov(1, 1))) / (p(1) * p(1));
  return out;
}

ExpFit fit_exponential(const std::vector<double>& n, const std::vector<double>& y, const std::vector<double>& weights) {
  const int m = static_cast<int>(n.size());
  if (m != static_cast<int>(y.size())) throw InvalidArgument("fit_exponential: size mismatch");
  if (!weights.empty() && static_cast<int>(weights.size()) != m)
    throw InvalidArgument("fit_exponential: weight count mismatch");
  if (m < 3) throw InvalidArgument("fit_exponential needs at least 3 points");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("fit_exponential: weights must be finite and >= 0");

  ExpFit out;
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    // Constant data: exact fit with lambda = 1.
    out.A = y.front();
    out.lambda = 1.0;
    return out;
  }
  std::vector<double> sw(m, 1.0);
  if (!weights.empty())
    for (int i = 0; i < m; ++i) sw[i] = std::sqrt(weights[i]);

  // Log-linear initial guess when all points share a sign.
  double A0 = y.front(), lam0 = 0.99;
  const bool same_sign = std::all_of(y.begin(), y.end(), [&](double v) { return v * y.front() > 0.0; });
  if (same_sign) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
      const double l = std::log(std::abs(y[i]));
      sx += n[i];
      sy += l;
      sxx += n[i] * n[i];
      sxy += n[i] * l;
    }
    const double den = m * sxx - sx * sx;
    if (den > 0.0) {
      const double slope = (m * sxy - sx * sy) / den;
      const double icpt = (sy - slope * sx) / m;
      lam0 = std::exp(slope);
      A0 = std::copysign(std::exp(icpt), y.front());
    }
  }
  VectorXd p(2);
  p << A0, lam0;
  MatrixXd cov;
  double chi2 = 0.0;
  p = least_squares<PowerModel>(n, y, sw, p, cov, chi2);
  out.A = p(0);
  out.lambda = p(1);
  out.chi2 = chi2;
  const double scale = weights.empty() ? chi2 / std::max(1, m - 2) : 1.0;
  out.sigma_A = std::sqrt(std::max(0.0, scale * cov(0, 0)));
  out.sigma_lambda = std::sqrt(std::max(0.0, scale * cov(1, 1)));
  return out;
}

namespace {

struct NmContext {
  const std::function<double(const std::vector<double>&)>* f;
  std::vector<double> buf;
};

double nm_trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<NmContext*>(params);
  for (std::size_t i = 0; i < ctx->buf.size(); ++i) ctx->buf[i] = gsl_vector_get(v, i);
  const double r = (*ctx->f)(ctx->buf);
  return std::isfinite(r) ? r : std::numeric_limits<double>::max();
}

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                           const std::vector<double>& step, double size_tol, int max_iter) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw InvalidArgument("nelder_mead: bad dimensions");
  // GSL aborts on errors by default; report them through return codes instead.
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;
  NmContext ctx{&f, std::vector<double>(n)};
  gsl_multimin_function fn{&nm_trampoline, n, &ctx};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(ss, i, step[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  MinimizeResult out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
  out.f = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(ss);
  return out;
}

}  // namespace kcq
