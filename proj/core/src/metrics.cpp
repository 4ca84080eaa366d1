#include "pupilload/metrics.hpp"

#include <cmath>
#include <string>

namespace pupilload {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 int n_classes) {
  if (y_true.size() != y_pred.size())
    throw Error("confusion_matrix: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                std::to_string(y_pred.size()) + ")");
  if (n_classes < 1) throw Error("confusion_matrix: n_classes must be >= 1");

  ConfusionMatrix cm;
  cm.n_classes = n_classes;
  cm.counts.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw Error("confusion_matrix: label out of range at index " + std::to_string(i));
    ++cm.at(t, p);
  }
  return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total <= 0) throw Error("classification_metrics: empty confusion matrix");

  ClassificationMetrics m;
  std::int64_t trace = 0;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  int present = 0;
  for (int c = 0; c < cm.n_classes; ++c) {
    const std::int64_t tp = cm.at(c, c);
    std::int64_t row = 0, col = 0;
    for (int j = 0; j < cm.n_classes; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    trace += tp;
    if (row == 0) continue;  // class absent from y_true
    ++present;
    const std::int64_t fp = col - tp;
    const std::int64_t fn = row - tp;
    sum_p += (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    sum_r += (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    sum_f += (2 * tp + fp + fn) > 0
                 ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn)
                 : 0.0;
  }
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  if (present > 0) {
    m.macro_precision = sum_p / present;
    m.macro_recall = sum_r / present;
    m.macro_f1 = sum_f / present;
  }
  return m;
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error("mae: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw Error("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) sum += std::fabs(y_true[i] - y_pred[i]);
  return sum / static_cast<double>(y_true.size());
}

}  // namespace pupilload
