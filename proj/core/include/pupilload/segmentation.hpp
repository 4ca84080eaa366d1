#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pupilload/distfit.hpp"
#include "pupilload/ingest.hpp"

namespace pupilload {

inline constexpr int kDefaultMinSamplesPerSegment = 30;
inline constexpr int kDefaultKMax = 30;

/// Uniform temporal partition of a recording's span into k segments.
struct SegmentPlan {
  int k = 1;
  std::vector<double> boundaries;  // k+1 times spanning [first t, last t]
};

SegmentPlan make_segment_plan(const Recording& rec, int k);

/// Splits the recording's time span [t_first, t_last] into k equal intervals
/// and buckets the diameters; intervals are half-open [a,b) with the final
/// one closed. Throws SparseSegmentError when any segment holds fewer than
/// min_samples_per_segment diameters (callers that feed the fit pipeline pass
/// kDefaultMinSamplesPerSegment; the default of 1 only rejects empty segments).
std::vector<std::vector<double>> uniform_segments(const Recording& rec, int k,
                                                  int min_samples_per_segment = 1);

/// The split-count cost for k segments: per segment, min-max normalize,
/// histogram the values, fit Normal and Beta, and sum both L1 fit errors
/// against the histogram. Bounded by 4k.
double segment_fit_cost(const Recording& rec, int k, int bins = kDefaultBins,
                        int min_samples_per_segment = kDefaultMinSamplesPerSegment);

struct KRange {
  int lo = 1;
  int hi = kDefaultKMax;
};

struct RecordingSplitChoice {
  std::string recording_id;
  int best_k = 0;
  double best_cost = 0.0;
};

struct SplitEstimate {
  int splits = 0;  // round-half-up mean of the per-recording optima
  std::vector<RecordingSplitChoice> per_recording;
  std::vector<std::string> skipped;  // recordings where every k was infeasible
};

/// Draws ceil(subset_fraction * |train|) recordings without replacement and
/// scans k over k_range for each, taking the arg-min of segment_fit_cost
/// (ties resolve to the smaller k, infeasible k are skipped). The returned
/// split count is the rounded mean of the per-recording optima.
SplitEstimate estimate_splits_detailed(const std::vector<Recording>& train,
                                       double subset_fraction, KRange k_range, int bins,
                                       std::uint64_t seed,
                                       int min_samples_per_segment = kDefaultMinSamplesPerSegment);

int estimate_splits(const std::vector<Recording>& train, double subset_fraction, KRange k_range,
                    int bins, std::uint64_t seed,
                    int min_samples_per_segment = kDefaultMinSamplesPerSegment);

/// Fixed-length view of a recording for the online mode.
struct Window {
  std::string parent_id;
  double start = 0.0;   // seconds, absolute recording time
  double length = 0.0;  // seconds
  std::vector<PupilSample> samples;  // times in [start, start+length)
  TlxLabel label;  // inherited from the parent recording

  Recording as_recording() const;
};

/// Slides a window of window_s seconds with step step_s over the recording.
/// Recordings shorter than twice the window size yield no windows at all.
std::vector<Window> window_recording(const Recording& rec, double window_s, double step_s);

}  // namespace pupilload
