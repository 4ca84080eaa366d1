#include "pupilload/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pupilload/features.hpp"
#include "pupilload/rng.hpp"

namespace pupilload {

namespace {

void check_recording(const Recording& rec) {
  if (rec.samples.empty()) throw EmptyRecordingError("recording '" + rec.id + "' has no samples");
  if (!(rec.duration() > 0.0))
    throw EmptyRecordingError("recording '" + rec.id + "' has zero duration");
}

}  // namespace

SegmentPlan make_segment_plan(const Recording& rec, int k) {
  if (k < 1) throw Error("segment count must be >= 1");
  check_recording(rec);
  SegmentPlan plan;
  plan.k = k;
  plan.boundaries.resize(static_cast<std::size_t>(k) + 1);
  const double t0 = rec.samples.front().t;
  const double t1 = rec.samples.back().t;
  for (int i = 0; i <= k; ++i)
    plan.boundaries[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / k;
  plan.boundaries.front() = t0;
  plan.boundaries.back() = t1;
  return plan;
}

std::vector<std::vector<double>> uniform_segments(const Recording& rec, int k,
                                                  int min_samples_per_segment) {
  if (k < 1) throw Error("segment count must be >= 1");
  if (min_samples_per_segment < 1) throw Error("min_samples_per_segment must be >= 1");
  check_recording(rec);

  const double t0 = rec.samples.front().t;
  const double span = rec.samples.back().t - t0;
  std::vector<std::vector<double>> segments(static_cast<std::size_t>(k));
  for (const auto& s : rec.samples) {
    auto idx = static_cast<long>(std::floor((s.t - t0) / span * k));
    if (idx < 0) idx = 0;
    if (idx >= k) idx = k - 1;  // the final interval is closed
    segments[static_cast<std::size_t>(idx)].push_back(s.diameter);
  }
  for (int i = 0; i < k; ++i) {
    if (segments[static_cast<std::size_t>(i)].size() <
        static_cast<std::size_t>(min_samples_per_segment))
      throw SparseSegmentError("recording '" + rec.id + "', k=" + std::to_string(k) + ": segment " +
                               std::to_string(i + 1) + " holds " +
                               std::to_string(segments[static_cast<std::size_t>(i)].size()) +
                               " samples (< " + std::to_string(min_samples_per_segment) + ")");
  }
  return segments;
}

double segment_fit_cost(const Recording& rec, int k, int bins, int min_samples_per_segment) {
  const auto segments = uniform_segments(rec, k, min_samples_per_segment);
  double cost = 0.0;
  for (const auto& seg : segments) {
    const SegmentFit fit = fit_segment(seg);
    const Histogram hist = histogram(fit.normalized, bins);
    const auto normal_masses = dist_bin_masses(fit.normal, hist.edges);
    cost += l1_fit_error(hist, normal_masses);
    if (fit.degenerate) {
      // Beta substitution for a constant segment: the same point mass the
      // sigma=0 Normal rule produces.
      cost += l1_fit_error(hist, normal_masses);
    } else {
      cost += l1_fit_error(hist, dist_bin_masses(fit.beta, hist.edges));
    }
  }
  return cost;
}

SplitEstimate estimate_splits_detailed(const std::vector<Recording>& train,
                                       double subset_fraction, KRange k_range, int bins,
                                       std::uint64_t seed, int min_samples_per_segment) {
  if (train.empty()) throw Error("estimate_splits: empty training set");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0))
    throw Error("estimate_splits: subset_fraction must be in (0,1]");
  if (k_range.lo < 1 || k_range.hi < k_range.lo) throw Error("estimate_splits: bad k range");

  const auto n = train.size();
  auto m = static_cast<std::size_t>(
      std::ceil(subset_fraction * static_cast<double>(n) - 1e-12));
  m = std::clamp<std::size_t>(m, 1, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0xe571));
  rng.shuffle(order);

  SplitEstimate est;
  for (std::size_t i = 0; i < m; ++i) {
    const Recording& rec = train[order[i]];
    int best_k = 0;
    double best_cost = 0.0;
    for (int k = k_range.lo; k <= k_range.hi; ++k) {
      double cost;
      try {
        cost = segment_fit_cost(rec, k, bins, min_samples_per_segment);
      } catch (const SparseSegmentError&) {
        continue;  // infeasible k for this recording
      }
      if (best_k == 0 || cost < best_cost) {  // ties keep the smaller k
        best_k = k;
        best_cost = cost;
      }
    }
    if (best_k == 0)
      est.skipped.push_back(rec.id);
    else
      est.per_recording.push_back({rec.id, best_k, best_cost});
  }
  if (est.per_recording.empty())
    throw Error("estimate_splits: every sampled recording was infeasible for all k in [" +
                std::to_string(k_range.lo) + "," + std::to_string(k_range.hi) + "]");

  double mean_k = 0.0;
  for (const auto& c : est.per_recording) mean_k += c.best_k;
  mean_k /= static_cast<double>(est.per_recording.size());
  est.splits = static_cast<int>(std::floor(mean_k + 0.5));  // round half up
  return est;
}

int estimate_splits(const std::vector<Recording>& train, double subset_fraction, KRange k_range,
                    int bins, std::uint64_t seed, int min_samples_per_segment) {
  return estimate_splits_detailed(train, subset_fraction, k_range, bins, seed,
                                  min_samples_per_segment)
      .splits;
}

Recording Window::as_recording() const {
  Recording rec;
  rec.id = parent_id + "#w" + std::to_string(static_cast<long long>(start * 1000.0));
  rec.samples = samples;
  rec.label = label;
  return rec;
}

std::vector<Window> window_recording(const Recording& rec, double window_s, double step_s) {
  if (!(window_s > 0.0)) throw Error("window size must be positive");
  if (!(step_s > 0.0)) throw Error("step size must be positive");

  std::vector<Window> windows;
  if (rec.samples.empty() || rec.duration() < 2.0 * window_s)
    return windows;  // recording excluded

  const double t0 = rec.samples.front().t;
  const double t1 = rec.samples.back().t;

  constexpr double kTimeEps = 1e-9;
  std::size_t cursor = 0;
  for (int j = 0;; ++j) {
    const double start = t0 + j * step_s;
    if (start + window_s > t1 + kTimeEps) break;
    Window w;
    w.parent_id = rec.id;
    w.start = start;
    w.length = window_s;
    w.label = rec.label;
    // Samples with t in [start, start+window_s). Successive windows only move
    // forward, so advance a cursor instead of rescanning.
    while (cursor < rec.samples.size() && rec.samples[cursor].t < start) ++cursor;
    for (std::size_t i = cursor; i < rec.samples.size() && rec.samples[i].t < start + window_s; ++i)
      w.samples.push_back(rec.samples[i]);
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace pupilload
