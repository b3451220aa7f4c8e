#pragma once

#include <functional>
#include <vector>

namespace kcq {

/// y(t) = A exp(-t / T) + C. When the data decay slower than 1e-4 of the
/// window, `lower_bound` is set, T is +inf and T_lower holds the bound.
struct DecayFit {
  double A = 0.0, C = 0.0, T = 0.0;
  double sigma_A = 0.0, sigma_C = 0.0, sigma_T = 0.0;
  int n_points = 0;
  bool lower_bound = false;
  double T_lower = 0.0;
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y);

/// y(n) = A lambda^n.
struct ExpFit {
  double A = 0.0, lambda = 1.0;
  double sigma_A = 0.0, sigma_lambda = 0.0;
  double chi2 = 0.0;
};

/// Weighted least squares; weights are inverse variances. With empty
/// weights every point counts equally and the covariance is scaled by the
/// residual variance.
ExpFit fit_exponential(const std::vector<double>& n, const std::vector<double>& y,
                       const std::vector<double>& weights = {});

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                           const std::vector<double>& step, double size_tol = 1e-6, int max_iter = 2000);

}  // namespace kcq
