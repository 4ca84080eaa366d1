#include "pupilload/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pupilload {

std::vector<double> normalize_minmax(std::span<const double> values) {
  if (values.empty()) throw Error("normalize_minmax: empty value list");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(values.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double scale = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) * scale;
  return out;
}

std::vector<double> squeeze_unit_interval(std::span<const double> values) {
  if (values.empty()) throw Error("squeeze_unit_interval: empty value list");
  const auto n = static_cast<double>(values.size());
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] * (n - 1.0) + 0.5) / n;
  return out;
}

SegmentFit fit_segment(std::span<const double> diameters) {
  if (diameters.empty()) throw Error("fit_segment: empty segment");
  SegmentFit fit;
  fit.normalized = normalize_minmax(diameters);

  const auto [lo_it, hi_it] = std::minmax_element(diameters.begin(), diameters.end());
  if (*lo_it == *hi_it) {
    fit.degenerate = true;
    fit.normal = NormalParams{0.5, 0.0};
    return fit;
  }

  const auto squeezed = squeeze_unit_interval(fit.normalized);
  fit.normal = fit_normal(squeezed);
  fit.beta = fit_beta(squeezed);
  return fit;
}

namespace {

FeatureVector extract_from_segments(const std::vector<std::vector<double>>& segments) {
  FeatureVector fv;
  fv.k = static_cast<int>(segments.size());
  fv.values.reserve(segments.size() * 2);
  for (const auto& seg : segments) {
    const SegmentFit fit = fit_segment(seg);
    if (fit.degenerate) {
      fv.values.push_back(0.0);
      fv.values.push_back(0.0);
    } else {
      fv.values.push_back(fit.normal.sigma);
      fv.values.push_back(beta_std(fit.beta));
    }
  }
  return fv;
}

}  // namespace

FeatureVector extract_feature(const Recording& rec, int k) {
  return extract_from_segments(uniform_segments(rec, k));
}

FeatureVector extract_feature(const Window& win, int k) {
  return extract_feature(win.as_recording(), k);
}

std::array<double, 4> baseline_pupil_stats(std::span<const double> diameters) {
  if (diameters.size() < 4) throw Error("baseline_pupil_stats: need at least 4 samples");
  const auto n = static_cast<double>(diameters.size());
  double mean = 0.0;
  for (double v : diameters) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : diameters) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0.0) return {mean, 0.0, 0.0, 0.0};
  const double sd = std::sqrt(m2);
  return {mean, sd, m3 / (m2 * sd), m4 / (m2 * m2)};
}

std::array<double, 4> baseline_pupil_stats(const Recording& rec) {
  std::vector<double> d;
  d.reserve(rec.samples.size());
  for (const auto& s : rec.samples) d.push_back(s.diameter);
  return baseline_pupil_stats(d);
}

}  // namespace pupilload
