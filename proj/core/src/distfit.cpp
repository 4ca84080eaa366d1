#include "pupilload/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pupilload {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

struct SampleMoments {
  double mean = 0.0;
  double var = 0.0;  // population (1/N)
};

SampleMoments moments(std::span<const double> values) {
  SampleMoments m;
  const auto n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  for (double v : values) {
    const double d = v - m.mean;
    m.var += d * d;
  }
  m.var /= n;
  return m;
}

/// Continued fraction for I_x(a,b), modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 2000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * kSqrt2));
}

int bin_index_of(double v, std::size_t bins) {
  const auto b = static_cast<double>(bins);
  auto idx = static_cast<long>(std::floor(v * b));
  if (idx < 0) idx = 0;
  if (idx >= static_cast<long>(bins)) idx = static_cast<long>(bins) - 1;
  return static_cast<int>(idx);
}

std::vector<double> point_mass(std::span<const double> edges, double at) {
  const std::size_t bins = edges.size() - 1;
  std::vector<double> masses(bins, 0.0);
  double v = std::clamp(at, 0.0, 1.0);
  masses[static_cast<std::size_t>(bin_index_of(v, bins))] = 1.0;
  return masses;
}

}  // namespace

Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw Error("histogram: empty value list");
  if (bins < 1) throw Error("histogram: bins must be >= 1");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw Error("histogram: value " + std::to_string(v) + " outside [0,1]");

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i)
    h.edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / bins;
  h.edges.front() = 0.0;
  h.edges.back() = 1.0;

  h.masses.assign(static_cast<std::size_t>(bins), 0.0);
  for (double v : values)
    h.masses[static_cast<std::size_t>(bin_index_of(v, static_cast<std::size_t>(bins)))] += 1.0;
  const auto n = static_cast<double>(values.size());
  for (double& m : h.masses) m /= n;
  return h;
}

NormalParams fit_normal(std::span<const double> values) {
  if (values.empty()) throw Error("fit_normal: empty value list");
  const auto m = moments(values);
  return NormalParams{m.mean, std::sqrt(std::max(0.0, m.var))};
}

BetaParams beta_moments_estimate(std::span<const double> values) {
  bool identical = true;
  for (double v : values)
    if (v != values.front()) {
      identical = false;
      break;
    }
  if (identical) throw DegenerateSegmentError("beta fit: all values identical");
  const auto m = moments(values);
  if (m.var <= 0.0) throw DegenerateSegmentError("beta fit: zero variance");
  // For data strictly inside (0,1), var < mean*(1-mean), so common > 0.
  const double common = std::max(m.mean * (1.0 - m.mean) / m.var - 1.0, 1e-12);
  return BetaParams{std::max(m.mean * common, 1e-12),
                    std::max((1.0 - m.mean) * common, 1e-12)};
}

double beta_log_likelihood(const BetaParams& p, std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  double mean_ln_x = 0.0, mean_ln_1mx = 0.0;
  for (double v : values) {
    mean_ln_x += std::log(v);
    mean_ln_1mx += std::log1p(-v);
  }
  mean_ln_x /= n;
  mean_ln_1mx /= n;
  return n * (-log_beta(p.alpha, p.beta) + (p.alpha - 1.0) * mean_ln_x +
              (p.beta - 1.0) * mean_ln_1mx);
}

BetaParams fit_beta(std::span<const double> values) {
  if (values.size() < 2) throw Error("fit_beta: need at least 2 values");
  for (double v : values)
    if (!(v > 0.0 && v < 1.0))
      throw Error("fit_beta: value " + std::to_string(v) + " not strictly inside (0,1)");

  const BetaParams init = beta_moments_estimate(values);  // throws on degenerate input

  const auto n = static_cast<double>(values.size());
  double mean_ln_x = 0.0, mean_ln_1mx = 0.0;
  for (double v : values) {
    mean_ln_x += std::log(v);
    mean_ln_1mx += std::log1p(-v);
  }
  mean_ln_x /= n;
  mean_ln_1mx /= n;

  auto loglik = [&](double a, double b) {
    return n * (-log_beta(a, b) + (a - 1.0) * mean_ln_x + (b - 1.0) * mean_ln_1mx);
  };

  constexpr int kMaxIter = 100;
  // Relative step tolerance. Tight enough that fits of affinely-identical
  // segments (which differ only in rounding) land within 1e-9 of each other.
  constexpr double kStepTol = 1e-10;

  double a = init.alpha, b = init.beta;
  double ll = loglik(a, b);
  bool converged = false;
  for (int iter = 0; iter < kMaxIter && !converged; ++iter) {
    const double psi_ab = digamma(a + b);
    const double ga = n * (psi_ab - digamma(a) + mean_ln_x);
    const double gb = n * (psi_ab - digamma(b) + mean_ln_1mx);
    const double tri_ab = trigamma(a + b);
    const double haa = n * (tri_ab - trigamma(a));
    const double hbb = n * (tri_ab - trigamma(b));
    const double hab = n * tri_ab;

    const double det = haa * hbb - hab * hab;
    if (det == 0.0 || !std::isfinite(det)) break;
    // Newton step: solve H * d = -g.
    double da = (-ga * hbb + gb * hab) / det;
    double db = (-gb * haa + ga * hab) / det;
    if (!std::isfinite(da) || !std::isfinite(db)) break;

    // Halve the step until the likelihood does not decrease and the
    // parameters stay in the positive orthant.
    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const double na = a + t * da;
      const double nb = b + t * db;
      if (na <= 0.0 || nb <= 0.0) continue;
      const double nll = loglik(na, nb);
      if (std::isfinite(nll) && nll >= ll) {
        const double rel_step = std::max(std::fabs(t * da) / std::max(1.0, std::fabs(na)),
                                         std::fabs(t * db) / std::max(1.0, std::fabs(nb)));
        a = na;
        b = nb;
        ll = nll;
        improved = true;
        converged = rel_step < kStepTol;
        break;
      }
    }
    if (!improved) break;
  }

  BetaParams out{a, b};
  // Likelihood dominance over the moments start is structural (only
  // non-decreasing steps were accepted); fall back defensively anyway.
  if (!(beta_log_likelihood(out, values) >= beta_log_likelihood(init, values) - 1e-9))
    return init;
  return out;
}

double beta_std(const BetaParams& p) {
  const double s = p.alpha + p.beta;
  return std::sqrt(p.alpha * p.beta / (s * s * (s + 1.0)));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("regularized_incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw Error("regularized_incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double ln_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::clamp(front * beta_cf(a, b, x) / a, 0.0, 1.0);
  return std::clamp(1.0 - front * beta_cf(b, a, 1.0 - x) / b, 0.0, 1.0);
}

std::vector<double> dist_bin_masses(const NormalParams& p, std::span<const double> edges) {
  if (edges.size() < 2) throw Error("dist_bin_masses: need at least 2 edges");
  const std::size_t bins = edges.size() - 1;
  if (p.sigma == 0.0) return point_mass(edges, p.mu);

  const double total = normal_cdf(edges.back(), p.mu, p.sigma) -
                       normal_cdf(edges.front(), p.mu, p.sigma);
  if (!(total > 1e-300)) return point_mass(edges, p.mu);  // numerically a point mass

  std::vector<double> masses(bins);
  double prev = normal_cdf(edges[0], p.mu, p.sigma);
  for (std::size_t j = 0; j < bins; ++j) {
    const double next = normal_cdf(edges[j + 1], p.mu, p.sigma);
    masses[j] = std::max(0.0, (next - prev) / total);
    prev = next;
  }
  return masses;
}

std::vector<double> dist_bin_masses(const BetaParams& p, std::span<const double> edges) {
  if (edges.size() < 2) throw Error("dist_bin_masses: need at least 2 edges");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> masses(bins);
  double prev = regularized_incomplete_beta(p.alpha, p.beta, edges[0]);
  for (std::size_t j = 0; j < bins; ++j) {
    const double next = regularized_incomplete_beta(p.alpha, p.beta, edges[j + 1]);
    masses[j] = std::max(0.0, next - prev);
    prev = next;
  }
  return masses;
}

double l1_fit_error(const Histogram& hist, std::span<const double> dist_masses) {
  if (hist.masses.size() != dist_masses.size())
    throw Error("l1_fit_error: length mismatch (" + std::to_string(hist.masses.size()) + " vs " +
                std::to_string(dist_masses.size()) + ")");
  double sum = 0.0;
  for (std::size_t j = 0; j < dist_masses.size(); ++j)
    sum += std::fabs(hist.masses[j] - dist_masses[j]);
  return sum;
}

double normal_pdf(const NormalParams& p, double x) {
  if (p.sigma <= 0.0) return 0.0;
  const double z = (x - p.mu) / p.sigma;
  return std::exp(-0.5 * z * z) / (p.sigma * std::sqrt(2.0 * 3.141592653589793238462643383279502884));
}

double beta_pdf(const BetaParams& p, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) -
                  log_beta(p.alpha, p.beta));
}

double digamma(double x) {
  // Recur up to x >= 8, then the asymptotic expansion.
  double result = 0.0;
  while (x < 8.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

double trigamma(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv * (1.0 + 0.5 * inv +
                   inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0)))));
  return result;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace pupilload
