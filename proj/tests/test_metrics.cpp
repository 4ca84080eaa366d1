#include <vector>

#include "doctest.h"
#include "pupilload/metrics.hpp"
#include "pupilload/rng.hpp"
#include "support/oracles.hpp"

using namespace pupilload;

TEST_CASE("confusion_matrix counts") {
  SUBCASE("perfect predictions are diagonal") {
    const std::vector<int> y{0, 1, 2, 1, 0};
    const auto cm = confusion_matrix(y, y, 3);
    for (int t = 0; t < 3; ++t)
      for (int p = 0; p < 3; ++p)
        CHECK(cm.at(t, p) == (t == p ? (t == 2 ? 1 : 2) : 0));
  }
  SUBCASE("everything predicted as class 0 fills one column") {
    const std::vector<int> y_true{0, 1, 2};
    const std::vector<int> y_pred{0, 0, 0};
    const auto cm = confusion_matrix(y_true, y_pred, 3);
    for (int t = 0; t < 3; ++t) {
      CHECK(cm.at(t, 0) == 1);
      CHECK(cm.at(t, 1) == 0);
      CHECK(cm.at(t, 2) == 0);
    }
  }
  SUBCASE("direct count example") {
    const std::vector<int> y_true{0, 1, 2};
    const std::vector<int> y_pred{0, 2, 2};
    const auto cm = confusion_matrix(y_true, y_pred, 3);
    CHECK(cm.at(1, 2) == 1);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(1, 1) == 0);
    CHECK(cm.at(2, 2) == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(confusion_matrix(std::vector<int>{0}, std::vector<int>{0, 1}, 2), Error);
    CHECK_THROWS_AS(confusion_matrix(std::vector<int>{5}, std::vector<int>{0}, 2), Error);
  }
}

TEST_CASE("classification_metrics on a perfect classifier") {
  const std::vector<int> y{0, 1, 2, 0, 1, 2};
  const auto m = classification_metrics(confusion_matrix(y, y, 3));
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.macro_precision == doctest::Approx(1.0));
  CHECK(m.macro_recall == doctest::Approx(1.0));
  CHECK(m.macro_f1 == doctest::Approx(1.0));
}

TEST_CASE("classification_metrics equals the brute-force recount") {
  Rng rng(404);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.below(2000);
    std::vector<int> y_true(n), y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_true[i] = static_cast<int>(rng.below(3));
      y_pred[i] = static_cast<int>(rng.below(3));
    }
    const auto got = classification_metrics(confusion_matrix(y_true, y_pred, 3));
    const auto want = oracles::brute_force_metrics(y_true, y_pred, 3);
    CHECK(got.accuracy == want.accuracy);
    CHECK(got.macro_precision == want.macro_precision);
    CHECK(got.macro_recall == want.macro_recall);
    CHECK(got.macro_f1 == want.macro_f1);
  }
}

TEST_CASE("metrics are invariant under consistent class relabeling") {
  Rng rng(11);
  const std::size_t n = 500;
  std::vector<int> y_true(n), y_pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    y_true[i] = static_cast<int>(rng.below(3));
    y_pred[i] = static_cast<int>(rng.below(3));
  }
  const int perm[3] = {2, 0, 1};
  std::vector<int> y_true_p(n), y_pred_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    y_true_p[i] = perm[y_true[i]];
    y_pred_p[i] = perm[y_pred[i]];
  }
  const auto a = classification_metrics(confusion_matrix(y_true, y_pred, 3));
  const auto b = classification_metrics(confusion_matrix(y_true_p, y_pred_p, 3));
  CHECK(a.accuracy == doctest::Approx(b.accuracy).epsilon(1e-12));
  CHECK(a.macro_precision == doctest::Approx(b.macro_precision).epsilon(1e-12));
  CHECK(a.macro_recall == doctest::Approx(b.macro_recall).epsilon(1e-12));
  CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-12));
}

TEST_CASE("random balanced predictions approach 1/3 accuracy") {
  Rng rng(88);
  const std::size_t n = 60000;
  std::vector<int> y_true(n), y_pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    y_true[i] = static_cast<int>(i % 3);
    y_pred[i] = static_cast<int>(rng.below(3));
  }
  const auto m = classification_metrics(confusion_matrix(y_true, y_pred, 3));
  CHECK(std::fabs(m.accuracy - 1.0 / 3.0) < 0.01);
}

TEST_CASE("classes absent from y_true are excluded from macro averages") {
  const std::vector<int> y_true{0, 0, 1, 1};
  const std::vector<int> y_pred{0, 1, 1, 1};
  const auto m = classification_metrics(confusion_matrix(y_true, y_pred, 3));
  // Class 2 never occurs; macro means run over classes 0 and 1 only.
  const double p0 = 1.0, p1 = 2.0 / 3.0;
  const double r0 = 0.5, r1 = 1.0;
  CHECK(m.macro_precision == doctest::Approx((p0 + p1) / 2.0).epsilon(1e-12));
  CHECK(m.macro_recall == doctest::Approx((r0 + r1) / 2.0).epsilon(1e-12));
}

TEST_CASE("mae") {
  CHECK(mae(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}) == 0.0);
  CHECK(mae(std::vector<double>{0.0, 10.0}, std::vector<double>{10.0, 0.0}) ==
        doctest::Approx(10.0));
  CHECK_THROWS_AS(mae(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), Error);
}
