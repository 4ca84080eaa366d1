#pragma once

#include <span>
#include <vector>

#include "pupilload/errors.hpp"

namespace pupilload {

inline constexpr int kDefaultBins = 20;

/// Probability histogram over [0,1] with uniform bin edges.
struct Histogram {
  std::vector<double> edges;   // bins+1 ascending values, edges[0]=0, edges[B]=1
  std::vector<double> masses;  // bins non-negative values summing to 1

  int bins() const { return static_cast<int>(masses.size()); }
};

/// Counts values (all in [0,1]) into `bins` uniform bins; a value of exactly
/// 1.0 lands in the last bin. Masses are counts/N.
Histogram histogram(std::span<const double> values, int bins);

struct NormalParams {
  double mu = 0.0;
  double sigma = 0.0;  // >= 0
};

struct BetaParams {
  double alpha = 1.0;  // > 0
  double beta = 1.0;   // > 0
};

/// Moment-matching fit: mu = sample mean, sigma = population (1/N) std.
NormalParams fit_normal(std::span<const double> values);

/// Maximum-likelihood Beta fit on values strictly inside (0,1): method-of-
/// moments start refined by damped Newton steps on the log-likelihood.
/// The returned parameters never have lower likelihood than the moments
/// estimate. Throws DegenerateSegmentError when all values are identical.
BetaParams fit_beta(std::span<const double> values);

/// Method-of-moments Beta estimate (the Newton starting point).
BetaParams beta_moments_estimate(std::span<const double> values);

/// Mean Beta log-likelihood times N, i.e. the full-data log-likelihood.
double beta_log_likelihood(const BetaParams& p, std::span<const double> values);

/// sqrt(alpha*beta / ((alpha+beta)^2 (alpha+beta+1))).
double beta_std(const BetaParams& p);

/// Regularized incomplete beta function I_x(a,b), continued-fraction
/// evaluation with the symmetry reduction I_x(a,b) = 1 - I_{1-x}(b,a).
double regularized_incomplete_beta(double a, double b, double x);

/// Per-bin masses of the fitted distribution as CDF differences over the
/// histogram edges. The Normal is truncated-renormalized to [0,1] so the
/// masses sum to 1; sigma == 0 puts mass 1 in the bin containing mu.
std::vector<double> dist_bin_masses(const NormalParams& p, std::span<const double> edges);
std::vector<double> dist_bin_masses(const BetaParams& p, std::span<const double> edges);

/// Sum of |hist mass - dist mass| over bins; in [0,2] for probability vectors.
double l1_fit_error(const Histogram& hist, std::span<const double> dist_masses);

// Densities, used when exporting fitted curves.
double normal_pdf(const NormalParams& p, double x);
double beta_pdf(const BetaParams& p, double x);

// Small special-function kit backing the Beta fit.
double digamma(double x);
double trigamma(double x);
double log_beta(double a, double b);

}  // namespace pupilload
