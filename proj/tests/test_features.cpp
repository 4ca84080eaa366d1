#include <cmath>
#include <vector>

#include "doctest.h"
#include "pupilload/features.hpp"
#include "pupilload/rng.hpp"

using namespace pupilload;

namespace {

Recording noise_recording(std::uint64_t seed, int n, double duration) {
  Rng rng(seed);
  Recording rec;
  rec.id = "n" + std::to_string(seed);
  for (int i = 0; i < n; ++i)
    rec.samples.push_back({duration * i / (n - 1), 3.0 + rng.normal() * 0.4, 1.0});
  return rec;
}

}  // namespace

TEST_CASE("normalize_minmax") {
  SUBCASE("endpoints") {
    const auto out = normalize_minmax(std::vector<double>{2.0, 4.0});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 1.0);
  }
  SUBCASE("degenerate rule") {
    const auto out = normalize_minmax(std::vector<double>{3.0, 3.0, 3.0});
    for (double v : out) CHECK(v == 0.5);
  }
  SUBCASE("affine map") {
    const auto out = normalize_minmax(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("squeeze_unit_interval") {
  SUBCASE("single value maps to 0.5") {
    const auto out = squeeze_unit_interval(std::vector<double>{0.0});
    CHECK(out[0] == doctest::Approx(0.5));
  }
  SUBCASE("N=5 endpoint") {
    const auto out = squeeze_unit_interval(std::vector<double>{1.0, 0.0, 0.5, 0.2, 0.8});
    CHECK(out[0] == doctest::Approx(0.9));
    CHECK(out[1] == doctest::Approx(0.1));
  }
  SUBCASE("order preserved and strictly inside (0,1)") {
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> values(1 + rng.below(200));
      for (double& v : values) v = rng.uniform();
      const auto out = squeeze_unit_interval(values);
      for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(out[i] > 0.0);
        CHECK(out[i] < 1.0);
        for (std::size_t j = i + 1; j < values.size(); ++j)
          if (values[i] < values[j]) CHECK(out[i] < out[j]);
      }
    }
  }
}

TEST_CASE("extract_feature shape and degenerate rule") {
  SUBCASE("constant recording maps to all zeros") {
    Recording rec;
    rec.id = "c";
    for (int i = 0; i < 300; ++i) rec.samples.push_back({i * 0.01, 3.0, 1.0});
    const auto fv = extract_feature(rec, 3);
    REQUIRE(fv.values.size() == 6);
    for (double v : fv.values) CHECK(v == 0.0);
  }
  SUBCASE("length is 2k") {
    const auto rec = noise_recording(1, 3000, 10.0);
    for (int k : {1, 5, 10}) {
      const auto fv = extract_feature(rec, k);
      CHECK(fv.k == k);
      CHECK(fv.values.size() == static_cast<std::size_t>(2 * k));
    }
  }
}

TEST_CASE("uniform segments give sigma_B near the uniform moment") {
  // Two segments of i.i.d. uniform noise; Beta std should approach
  // sqrt(1/12) = 0.2887 at 1e4 samples per segment.
  Rng rng(2024);
  Recording rec;
  rec.id = "unif";
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    rec.samples.push_back({i * 0.001, 2.0 + rng.uniform(), 1.0});
  const auto fv = extract_feature(rec, 2);
  REQUIRE(fv.values.size() == 4);
  const double want = std::sqrt(1.0 / 12.0);
  CHECK(std::fabs(fv.values[1] - want) < 0.03);
  CHECK(std::fabs(fv.values[3] - want) < 0.03);
}

TEST_CASE("extract_feature is invariant to affine transforms of the signal") {
  Rng rng(55);
  for (int rep = 0; rep < 10; ++rep) {
    const auto rec = noise_recording(900 + static_cast<std::uint64_t>(rep), 1200, 8.0);
    const double a = rng.uniform(0.1, 10.0);
    const double b = rng.uniform(-5.0, 5.0);
    Recording scaled = rec;
    for (auto& s : scaled.samples) s.diameter = a * s.diameter + b;

    const auto fv = extract_feature(rec, 4);
    const auto fv2 = extract_feature(scaled, 4);
    REQUIRE(fv.values.size() == fv2.values.size());
    for (std::size_t i = 0; i < fv.values.size(); ++i)
      CHECK(std::fabs(fv.values[i] - fv2.values[i]) < 1e-9);
  }
}

TEST_CASE("permuting diameters within one segment leaves its feature pair unchanged") {
  auto rec = noise_recording(77, 1000, 10.0);
  const auto before = extract_feature(rec, 2);

  // Reverse the diameters of the first half (first segment) in place.
  std::vector<double> first_half;
  for (const auto& s : rec.samples)
    if (s.t < 5.0) first_half.push_back(s.diameter);
  std::size_t j = first_half.size();
  for (auto& s : rec.samples) {
    if (s.t < 5.0) s.diameter = first_half[--j];
    if (j == 0) break;
  }

  const auto after = extract_feature(rec, 2);
  for (std::size_t i = 0; i < before.values.size(); ++i)
    CHECK(before.values[i] == doctest::Approx(after.values[i]).epsilon(1e-12));
}

TEST_CASE("feature entries respect the normalized-scale bounds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rec = noise_recording(seed, 800, 6.0);
    const auto fv = extract_feature(rec, 4);
    for (std::size_t i = 0; i < fv.values.size(); i += 2) {
      CHECK(fv.values[i] >= 0.0);      // sigma_N
      CHECK(fv.values[i] <= 0.5);
      CHECK(fv.values[i + 1] >= 0.0);  // sigma_B
      CHECK(fv.values[i + 1] < 0.5);
    }
  }
}

TEST_CASE("baseline_pupil_stats") {
  SUBCASE("constant data uses the zero convention for shape moments") {
    const auto s = baseline_pupil_stats(std::vector<double>{3.0, 3.0, 3.0, 3.0});
    CHECK(s[0] == doctest::Approx(3.0));
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
    CHECK(s[3] == 0.0);
  }
  SUBCASE("symmetric two-point data has zero skewness") {
    const auto s = baseline_pupil_stats(std::vector<double>{1.0, 3.0, 1.0, 3.0});
    CHECK(s[2] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("Gaussian kurtosis approaches 3 (raw convention)") {
    Rng rng(616);
    std::vector<double> values(100000);
    for (double& v : values) v = rng.normal(3.0, 0.2);
    const auto s = baseline_pupil_stats(values);
    CHECK(std::fabs(s[3] - 3.0) < 0.1);
    CHECK(s[0] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(s[1] == doctest::Approx(0.2).epsilon(0.02));
  }
  SUBCASE("needs at least 4 samples") {
    CHECK_THROWS_AS(baseline_pupil_stats(std::vector<double>{1.0, 2.0, 3.0}), Error);
  }
}
