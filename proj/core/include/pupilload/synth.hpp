#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pupilload/ingest.hpp"

namespace pupilload {

/// Recipe for one synthetic pupil recording. The signal is built from four
/// activity blocks on staggered base levels: sweep blocks drift slowly and
/// linearly through the block, flat blocks hold a variance-matched Gaussian
/// dilation process, and measurement noise sits on top. The class decides the
/// temporal order of sweep/flat blocks.
struct SynthSpec {
  CloadClass cls = CloadClass::C1;
  double duration_s = 60.0;
  double rate_hz = 240.0;
  double base_diameter = 3.0;   // mm
  double dilation_std = 0.08;   // mm; class profiles scale this upward
  double drift_amplitude = 0.8; // mm, drift swing of a sweep block
  double noise_std = 0.02;      // mm, measurement noise
  std::uint64_t seed = 0;
};

/// The spec for one class in the default dataset profile: dilation_std grows
/// strictly with the class index, and the class selects which of the four
/// activity blocks carry the drift oscillation.
SynthSpec default_profile(CloadClass cls, std::uint64_t seed);

/// Representative mean TLX score used to label a synthetic class
/// (15, 40, 70 for C1, C2, C3).
double representative_score(CloadClass cls);

/// Deterministic synthetic recording. Classes separate through the temporal
/// order of active/quiet blocks rather than through whole-recording
/// statistics, so segment-level features can tell them apart while global
/// moments cannot.
Recording generate_recording(const SynthSpec& spec);

/// Balanced dataset of 3*n_per_class recordings with per-recording derived
/// seeds. The template's class and seed fields are overridden per recording;
/// dilation_std is scaled per class so it stays strictly increasing.
std::vector<Recording> generate_dataset(int n_per_class, const SynthSpec& profile,
                                        std::uint64_t seed);

/// Recording whose dilation variance alternates between sigma_hi and
/// sigma_lo over `blocks` equal time blocks (used to exercise the
/// split-count estimator against a known ground truth).
Recording generate_piecewise_recording(const std::string& id, int blocks, double sigma_hi,
                                       double sigma_lo, double base_diameter, double duration_s,
                                       double rate_hz, std::uint64_t seed);

}  // namespace pupilload
