#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pupilload/errors.hpp"

namespace pupilload {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::int64_t> counts;  // n_classes * n_classes, row-major

  std::int64_t at(int t, int p) const { return counts[static_cast<std::size_t>(t) * n_classes + p]; }
  std::int64_t& at(int t, int p) { return counts[static_cast<std::size_t>(t) * n_classes + p]; }
  std::int64_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 int n_classes);

/// Accuracy plus macro-averaged precision/recall/F1. Per class with zero
/// denominator the metric is 0, and classes absent from y_true are excluded
/// from the macro means.
struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

/// Mean absolute error.
double mae(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace pupilload
