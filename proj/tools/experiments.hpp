#pragma once

// Shared plumbing for the pupilload CLI: feature-table construction, the
// table1/2/3 experiment harnesses, fit exports, and synthetic dataset dumps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pupilload/features.hpp"
#include "pupilload/ingest.hpp"
#include "pupilload/learn.hpp"
#include "pupilload/metrics.hpp"
#include "pupilload/segmentation.hpp"

namespace pupilload::cli {

struct CommonOptions {
  std::uint64_t seed = 42;
  int bins = kDefaultBins;
  int k = 0;  // 0 = estimate from the training split
  int k_min = 1;
  int k_max = kDefaultKMax;
  int min_samples = kDefaultMinSamplesPerSegment;
  double subset_fraction = 0.3;
  double train_fraction = 0.8;
  double confidence = kDefaultConfidenceThreshold;
};

std::vector<ModelKind> parse_methods(const std::string& csv);
std::vector<double> parse_number_list(const std::string& csv);
std::vector<int> parse_int_list(const std::string& csv);

/// Labeled design matrix for one feature family over a set of recordings.
/// Recordings that fail extraction are skipped with a warning on stderr.
struct LabeledFeatures {
  Matrix x;
  std::vector<int> y;
  std::vector<double> scores;  // mean TLX per row
  std::vector<std::string> ids;
};

LabeledFeatures proposed_features(const std::vector<Recording>& recs, int k);
LabeledFeatures baseline_features(const std::vector<Recording>& recs);

struct MetricRow {
  std::string feature;
  std::string method;
  std::optional<double> window_s;
  ClassificationMetrics metrics;
};

void print_metric_table(const std::vector<MetricRow>& rows);
void write_metric_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);

struct RegressionRow {
  std::string feature;
  int hidden = 0;
  double mae = 0.0;
};

int cmd_estimate_splits(const std::filesystem::path& manifest, const CommonOptions& opt);
int cmd_extract(const std::filesystem::path& manifest, const CommonOptions& opt,
                const std::filesystem::path& out_csv);
int cmd_table1(const std::filesystem::path& manifest, const CommonOptions& opt,
               const std::string& methods, const std::filesystem::path& out_csv);
int cmd_table2(const std::filesystem::path& manifest, const CommonOptions& opt,
               const std::string& methods, const std::string& windows,
               const std::filesystem::path& out_csv);
int cmd_table3(const std::filesystem::path& manifest, const CommonOptions& opt,
               const std::string& hidden_sizes, int epochs, double learning_rate,
               const std::filesystem::path& out_csv);
int cmd_plot_fits(const std::filesystem::path& recording, const CommonOptions& opt,
                  const std::filesystem::path& out_dir);
int cmd_synth(const std::filesystem::path& out_dir, int n_per_class, double duration_s,
              double rate_hz, std::uint64_t seed);

}  // namespace pupilload::cli
