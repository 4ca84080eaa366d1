#pragma once

// Independent test oracles. Everything here is deliberately implemented by
// the most direct route available (quadrature, rejection sampling, per-class
// recounting) and never calls into the code paths it is used to check.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "pupilload/rng.hpp"

namespace oracles {

// ------------------------------------------------------------ quadrature --

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m);
  const double right = simpson(f, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, left, 0.5 * eps, depth - 1) +
         adaptive_simpson_rec(f, m, b, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
  if (a == b) return 0.0;
  return adaptive_simpson_rec(f, a, b, simpson(f, a, b), eps, 40);
}

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_density(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b));
}

/// I_x(a,b) by quadrature. Shape parameters below 1 are lifted with the
/// recurrence I_x(a,b) = x^a (1-x)^b / (a B(a,b)) + I_x(a+1,b) (and its
/// mirror image) so the integrand stays bounded.
inline double beta_cdf_quadrature(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (a < 1.0)
    return std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b)) / a +
           beta_cdf_quadrature(a + 1.0, b, x);
  if (b < 1.0)
    return 1.0 - (std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b)) / b +
                  (1.0 - beta_cdf_quadrature(a, b + 1.0, x)));
  return integrate([a, b](double t) { return beta_density(a, b, t); }, 0.0, x, 1e-13);
}

inline double normal_density(double mu, double sigma, double x) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * 3.141592653589793238462643383279502884));
}

/// Mean of a Normal(mu, sigma) truncated to [lo, hi], by quadrature.
inline double truncated_normal_mean(double mu, double sigma, double lo, double hi) {
  const double mass =
      integrate([&](double x) { return normal_density(mu, sigma, x); }, lo, hi, 1e-13);
  const double first =
      integrate([&](double x) { return x * normal_density(mu, sigma, x); }, lo, hi, 1e-13);
  return first / mass;
}

// -------------------------------------------------------------- sampling --

/// Marsaglia-Tsang gamma sampler (shape only; unit scale).
inline double gamma_sample(pupilload::Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z = rng.normal();
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double beta_sample(pupilload::Rng& rng, double a, double b) {
  const double x = gamma_sample(rng, a);
  const double y = gamma_sample(rng, b);
  // Extreme shape parameters can round the ratio onto an endpoint; nudge
  // back inside the open interval.
  return std::min(std::max(x / (x + y), 1e-15), 1.0 - 1e-15);
}

// ------------------------------------------------------- metrics recount --

struct BruteMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Per-class TP/FP/FN recomputed straight from the label lists.
inline BruteMetrics brute_force_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                        int n_classes) {
  BruteMetrics m;
  long correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++correct;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] == c) {
        ++support;
        if (y_pred[i] == c)
          ++tp;
        else
          ++fn;
      } else if (y_pred[i] == c) {
        ++fp;
      }
    }
    if (support == 0) continue;
    ++present;
    m.macro_precision += (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.macro_recall += (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.macro_f1 += (2 * tp + fp + fn) > 0 ? 2.0 * static_cast<double>(tp) / (2 * tp + fp + fn) : 0.0;
  }
  if (present > 0) {
    m.macro_precision /= present;
    m.macro_recall /= present;
    m.macro_f1 /= present;
  }
  return m;
}

// ---------------------------------------------------- finite differences --

inline std::vector<double> central_differences(const std::function<double(std::span<const double>)>& f,
                                               std::vector<double> x, double step = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double hi = f(x);
    x[i] = keep - step;
    const double lo = f(x);
    x[i] = keep;
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracles
