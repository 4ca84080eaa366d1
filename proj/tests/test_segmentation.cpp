#include <cmath>
#include <vector>

#include "doctest.h"
#include "pupilload/rng.hpp"
#include "pupilload/segmentation.hpp"
#include "pupilload/synth.hpp"

using namespace pupilload;

namespace {

Recording make_recording(const std::vector<double>& times, const std::vector<double>& diameters) {
  Recording rec;
  rec.id = "t";
  for (std::size_t i = 0; i < times.size(); ++i)
    rec.samples.push_back({times[i], diameters[i], 1.0});
  return rec;
}

Recording uniform_recording(int n, double duration, double base = 3.0) {
  Recording rec;
  rec.id = "u";
  for (int i = 0; i < n; ++i)
    rec.samples.push_back({duration * i / (n - 1), base + 0.001 * (i % 7), 1.0});
  return rec;
}

}  // namespace

TEST_CASE("uniform_segments basics") {
  SUBCASE("k=1 keeps everything in one list") {
    const auto rec = uniform_recording(50, 1.0);
    const auto segs = uniform_segments(rec, 1);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].size() == 50);
  }
  SUBCASE("uniform spacing splits evenly") {
    const auto rec = uniform_recording(240, 1.0);
    const auto segs = uniform_segments(rec, 2);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].size() == 120);
    CHECK(segs[1].size() == 120);
  }
  SUBCASE("boundary rule: half-open intervals, last closed") {
    const auto rec = make_recording({0.0, 0.4, 0.5, 0.9, 1.0}, {1, 2, 3, 4, 5});
    const auto segs = uniform_segments(rec, 2);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].size() == 2);  // 0.0, 0.4
    CHECK(segs[1].size() == 3);  // 0.5, 0.9, 1.0
  }
  SUBCASE("sparse segments error at the configured minimum") {
    const auto rec = make_recording({0.0, 0.4, 0.5, 0.9, 1.0}, {1, 2, 3, 4, 5});
    CHECK_THROWS_AS(uniform_segments(rec, 2, 3), SparseSegmentError);
    CHECK_NOTHROW(uniform_segments(rec, 2, 2));
  }
  SUBCASE("empty segment errors even at the default minimum") {
    const auto rec = make_recording({0.0, 0.1, 0.9, 1.0}, {1, 2, 3, 4});
    CHECK_THROWS_AS(uniform_segments(rec, 5), SparseSegmentError);
  }
}

TEST_CASE("uniform_segments is a partition in time order") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Recording rec;
    rec.id = "p";
    double t = 0.0;
    const int n = 100 + static_cast<int>(rng.below(400));
    for (int i = 0; i < n; ++i) {
      t += rng.uniform(0.001, 0.05);
      rec.samples.push_back({t, rng.uniform(2.0, 5.0), 1.0});
    }
    const int k = 1 + static_cast<int>(rng.below(7));
    std::vector<std::vector<double>> segs;
    try {
      segs = uniform_segments(rec, k);
    } catch (const SparseSegmentError&) {
      continue;
    }
    std::vector<double> flat;
    for (const auto& s : segs) flat.insert(flat.end(), s.begin(), s.end());
    REQUIRE(flat.size() == rec.samples.size());
    for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat[i] == rec.samples[i].diameter);
  }
}

TEST_CASE("make_segment_plan spans the recording uniformly") {
  const auto rec = uniform_recording(101, 10.0);
  const auto plan = make_segment_plan(rec, 4);
  REQUIRE(plan.boundaries.size() == 5);
  CHECK(plan.boundaries.front() == doctest::Approx(0.0));
  CHECK(plan.boundaries.back() == doctest::Approx(10.0));
  const double width = plan.boundaries[1] - plan.boundaries[0];
  for (std::size_t i = 0; i + 1 < plan.boundaries.size(); ++i)
    CHECK(plan.boundaries[i + 1] - plan.boundaries[i] == doctest::Approx(width).epsilon(1e-9));
}

TEST_CASE("segment_fit_cost is bounded by 4k and finite on constants") {
  SUBCASE("constant recording") {
    Recording rec;
    rec.id = "const";
    for (int i = 0; i < 300; ++i) rec.samples.push_back({i * 0.01, 3.0, 1.0});
    const double cost = segment_fit_cost(rec, 3, 20, 1);
    CHECK(std::isfinite(cost));
    CHECK(cost >= 0.0);
    CHECK(cost <= 12.0);
  }
  SUBCASE("random recordings stay within [0, 4k]") {
    Rng rng(17);
    for (int rep = 0; rep < 8; ++rep) {
      Recording rec;
      rec.id = "r";
      const int n = 600 + static_cast<int>(rng.below(600));
      for (int i = 0; i < n; ++i)
        rec.samples.push_back({i * 0.004, 3.0 + rng.normal() * 0.3, 1.0});
      const int k = 1 + static_cast<int>(rng.below(6));
      const double cost = segment_fit_cost(rec, k);
      CHECK(cost >= 0.0);
      CHECK(cost <= 4.0 * k);
    }
  }
}

TEST_CASE("segment_fit_cost prefers the true block count on piecewise data") {
  const auto rec = generate_piecewise_recording("pw5", 5, 0.5, 0.05, 3.0, 60.0, 240.0, 99);
  CHECK(segment_fit_cost(rec, 5) <= segment_fit_cost(rec, 1));
}

TEST_CASE("estimate_splits returns the brute-force argmin") {
  // One recording: the estimate must equal an independent scan's argmin.
  const auto rec = generate_piecewise_recording("pw", 5, 0.5, 0.05, 3.0, 30.0, 240.0, 7);
  const KRange range{1, 12};
  const int bins = 20;

  int brute_best = 0;
  double brute_cost = 0.0;
  for (int k = range.lo; k <= range.hi; ++k) {
    double c;
    try {
      c = segment_fit_cost(rec, k, bins);
    } catch (const SparseSegmentError&) {
      continue;
    }
    if (brute_best == 0 || c < brute_cost) {
      brute_best = k;
      brute_cost = c;
    }
  }
  REQUIRE(brute_best > 0);

  const auto est = estimate_splits_detailed({rec}, 1.0, range, bins, 123);
  REQUIRE(est.per_recording.size() == 1);
  CHECK(est.per_recording[0].best_k == brute_best);
  CHECK(est.splits == brute_best);  // mean of a singleton
}

TEST_CASE("estimate_splits rounds the mean of per-recording optima half-up") {
  std::vector<Recording> recs;
  for (int i = 0; i < 6; ++i)
    recs.push_back(generate_piecewise_recording("pw" + std::to_string(i), 4 + (i % 3), 0.5, 0.05,
                                                3.0, 30.0, 240.0, 40 + i));
  const KRange range{1, 10};
  const auto est = estimate_splits_detailed(recs, 1.0, range, 20, 5);
  REQUIRE(!est.per_recording.empty());
  double mean = 0.0;
  for (const auto& c : est.per_recording) mean += c.best_k;
  mean /= static_cast<double>(est.per_recording.size());
  CHECK(est.splits == static_cast<int>(std::floor(mean + 0.5)));
}

TEST_CASE("estimate_splits is deterministic and honors the subset fraction") {
  std::vector<Recording> recs;
  for (int i = 0; i < 10; ++i)
    recs.push_back(
        generate_piecewise_recording("d" + std::to_string(i), 5, 0.4, 0.08, 3.0, 20.0, 240.0,
                                     100 + i));
  const auto a = estimate_splits_detailed(recs, 0.3, {1, 8}, 20, 77);
  const auto b = estimate_splits_detailed(recs, 0.3, {1, 8}, 20, 77);
  CHECK(a.splits == b.splits);
  CHECK(a.per_recording.size() == 3);  // ceil(0.3 * 10)
  REQUIRE(a.per_recording.size() == b.per_recording.size());
  for (std::size_t i = 0; i < a.per_recording.size(); ++i) {
    CHECK(a.per_recording[i].recording_id == b.per_recording[i].recording_id);
    CHECK(a.per_recording[i].best_k == b.per_recording[i].best_k);
  }
}

TEST_CASE("estimate_splits errors when no k is feasible anywhere") {
  // 5 samples cannot satisfy 30 samples per segment for any k.
  Recording rec = make_recording({0.0, 0.25, 0.5, 0.75, 1.0}, {1, 2, 3, 4, 5});
  CHECK_THROWS_AS(estimate_splits({rec}, 1.0, {1, 5}, 20, 0), Error);
}

TEST_CASE("window_recording") {
  SUBCASE("short recordings are excluded entirely") {
    const auto rec = uniform_recording(45 * 240 + 1, 45.0);
    CHECK(window_recording(rec, 25.0, 12.5).empty());
  }
  SUBCASE("60 s recording, 20 s window, 10 s step gives 5 windows") {
    const auto rec = uniform_recording(60 * 240 + 1, 60.0);
    const auto windows = window_recording(rec, 20.0, 10.0);
    REQUIRE(windows.size() == 5);
    for (std::size_t j = 0; j < windows.size(); ++j)
      CHECK(windows[j].start == doctest::Approx(10.0 * static_cast<double>(j)));
  }
  SUBCASE("boundary case duration == 2*window") {
    const auto rec = uniform_recording(40 * 240 + 1, 40.0);
    CHECK(window_recording(rec, 20.0, 10.0).size() == 3);
  }
  SUBCASE("window samples live in [start, start+length) and inherit the label") {
    auto rec = uniform_recording(2401, 10.0);
    rec.label = TlxLabel::from_subscores({70, 70, 70, 70, 70, 70});
    const auto windows = window_recording(rec, 4.0, 2.0);
    REQUIRE(!windows.empty());
    for (const auto& w : windows) {
      CHECK(w.label.cls == CloadClass::C3);
      for (const auto& s : w.samples) {
        CHECK(s.t >= w.start);
        CHECK(s.t < w.start + w.length);
      }
    }
  }
  SUBCASE("count formula holds across a grid") {
    for (double duration : {20.0, 33.0, 47.5, 60.0, 90.0})
      for (double window : {5.0, 10.0, 15.0}) {
        const int n = static_cast<int>(duration * 40) + 1;
        const auto rec = uniform_recording(n, duration);
        const auto windows = window_recording(rec, window, window / 2.0);
        if (duration < 2.0 * window) {
          CHECK(windows.empty());
        } else {
          const auto expected =
              static_cast<std::size_t>(std::floor((duration - window) / (window / 2.0) + 1e-9)) + 1;
          CHECK(windows.size() == expected);
        }
      }
  }
}
