#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gprlab/core/bscan.hpp"

namespace gprlab::eval {

/// counts[t][p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  std::vector<std::vector<std::int64_t>> counts;

  explicit ConfusionMatrix(int num_classes = kNumClasses);
  int num_classes() const { return static_cast<int>(counts.size()); }
  std::int64_t total() const;
  std::int64_t trace() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> truths,
                                 int num_classes = kNumClasses);

struct ClassMetrics {
  std::string name;
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;
  /// Set when any of the metrics hit a zero denominator and was reported as 0.
  bool degenerate = false;
};

/// Per-class one-vs-rest rows plus the "All" row: macro means of precision,
/// recall and f1, accuracy = trace / total, support = total.
struct ClassificationReport {
  std::vector<ClassMetrics> classes;
  ClassMetrics all;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

/// precision = TP/(TP+FP), recall = TP/(TP+FN), one-vs-rest accuracy =
/// (TP+TN)/total.
ClassificationReport report(const ConfusionMatrix& cm);

std::string report_to_json(const ClassificationReport& r);
/// Aligned columns: Class, Accuracy, Precision, Recall, F1, N.
std::string report_to_text(const ClassificationReport& r);

}  // namespace gprlab::eval
