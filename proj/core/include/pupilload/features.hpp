#pragma once

#include <array>
#include <span>
#include <vector>

#include "pupilload/distfit.hpp"
#include "pupilload/segmentation.hpp"

namespace pupilload {

/// Per-segment (sigma_Normal, sigma_Beta) pairs, interleaved in time order:
/// (sN_1, sB_1, sN_2, sB_2, ..., sN_k, sB_k).
struct FeatureVector {
  int k = 0;
  std::vector<double> values;  // length 2k
};

/// (x - min) / (max - min); when max == min every output is 0.5.
std::vector<double> normalize_minmax(std::span<const double> values);

/// x -> (x*(N-1) + 0.5) / N, mapping [0,1] strictly inside (0,1).
std::vector<double> squeeze_unit_interval(std::span<const double> values);

/// The per-segment fit chain: min-max normalize, squeeze, fit Normal and
/// Beta. A segment whose raw values are all equal is degenerate; its fits
/// collapse to a point at 0.5.
struct SegmentFit {
  bool degenerate = false;
  NormalParams normal;  // sigma 0 when degenerate
  BetaParams beta;      // unused when degenerate
  std::vector<double> normalized;  // min-max normalized values, in [0,1]
};

SegmentFit fit_segment(std::span<const double> diameters);

/// Feature of the whole recording at segment count k: per segment the fitted
/// sigma_Normal and sigma_Beta (degenerate segments contribute (0,0)).
FeatureVector extract_feature(const Recording& rec, int k);
FeatureVector extract_feature(const Window& win, int k);

/// (mean, population std, skewness, kurtosis) of the raw diameters; the
/// kurtosis is the raw (non-excess) convention, and both shape moments are 0
/// for zero-variance data. Requires at least 4 samples.
std::array<double, 4> baseline_pupil_stats(std::span<const double> diameters);
std::array<double, 4> baseline_pupil_stats(const Recording& rec);

}  // namespace pupilload
