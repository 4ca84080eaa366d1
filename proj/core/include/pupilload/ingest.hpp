#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pupilload/errors.hpp"

namespace pupilload {

/// Cognitive-load class derived from the mean NASA-TLX score.
enum class CloadClass : int { C1 = 0, C2 = 1, C3 = 2 };

const char* class_name(CloadClass c);

/// Bins a mean NASA-TLX score: < 30 -> C1, 30..50 -> C2, > 50 -> C3.
/// The boundary scores 30 and 50 both map to C2. Throws Error outside [0,100].
CloadClass bin_class(double mean_score);

inline constexpr std::size_t kTlxSubscores = 6;

/// Six NASA-TLX subscores (mental, physical, temporal, performance, effort,
/// frustration), their mean, and the derived 3-class bin.
struct TlxLabel {
  std::array<double, kTlxSubscores> subscores{};
  double mean_score = 0.0;
  CloadClass cls = CloadClass::C1;

  static TlxLabel from_subscores(const std::array<double, kTlxSubscores>& s);
};

struct PupilSample {
  double t = 0.0;           // seconds from recording start
  double diameter = 0.0;    // device units, > 0 for valid samples
  double confidence = 1.0;  // [0,1]; 1.0 when the source lacks confidence
};

struct Recording {
  std::string id;
  std::string subject_id;
  std::string activity_id;
  double nominal_rate = 240.0;  // Hz
  std::vector<PupilSample> samples;  // strictly increasing in t
  TlxLabel label;

  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t dropped_nonfinite = 0;
  std::size_t dropped_nonpositive = 0;
  std::size_t dropped_duplicate_t = 0;

  std::size_t dropped() const {
    return dropped_nonfinite + dropped_nonpositive + dropped_duplicate_t;
  }
};

/// Loads a recording CSV with header `t,diameter,confidence`. Samples are
/// sorted by t; rows with non-finite or non-positive diameter are dropped and
/// counted in `stats`. Throws ParseError (naming the line) on malformed rows
/// and EmptyRecordingError when nothing usable remains.
Recording load_recording(const std::filesystem::path& path, LoadStats* stats = nullptr);

/// Writes the `t,diameter,confidence` CSV form of a recording. Values
/// round-trip exactly through load_recording.
void write_recording(const std::filesystem::path& path, const Recording& rec);

inline constexpr double kDefaultConfidenceThreshold = 0.6;

/// Keeps samples with confidence >= threshold; metadata is unchanged.
/// Throws EmptyRecordingError when the filter removes everything.
Recording filter_confidence(const Recording& rec, double threshold);

struct ManifestEntry {
  std::filesystem::path path;  // as written in the manifest
  std::string subject_id;
  std::string activity_id;
  std::array<double, kTlxSubscores> subscores{};
};

/// Loads a manifest CSV with header
/// `path,subject,activity,mental,physical,temporal,performance,effort,frustration`.
/// Paths must be unique and subscores within [0,100].
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct DatasetOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
  double nominal_rate = 240.0;
};

/// Loads every manifest entry into a labeled Recording. Relative entry paths
/// resolve against the manifest's directory.
std::vector<Recording> load_dataset(const std::filesystem::path& manifest_path,
                                    const DatasetOptions& opts = {});

/// Seeded random partition at whole-recording granularity;
/// |train| = round(train_fraction * N). Identical seeds give identical splits.
std::pair<std::vector<Recording>, std::vector<Recording>> split_train_test(
    std::vector<Recording> dataset, double train_fraction, std::uint64_t seed);

}  // namespace pupilload
