#include "gprlab/eval/metrics.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gprlab/core/error.hpp"

namespace gprlab::eval {

using nlohmann::json;

namespace {

double ratio(std::int64_t num, std::int64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string display_name(int c) {
  if (c < kNumClasses) {
    const std::string_view n = class_name(class_from_id(c));
    if (n == "pvc") return "PVC";
    std::string s(n);
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  }
  return "Class " + std::to_string(c);
}

json metrics_json(const ClassMetrics& m) {
  return {{"class", m.name},   {"accuracy", m.accuracy}, {"precision", m.precision},
          {"recall", m.recall}, {"f1", m.f1},             {"support", m.support},
          {"degenerate", m.degenerate}};
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : counts(num_classes, std::vector<std::int64_t>(num_classes, 0)) {
  require(num_classes > 0, ErrorCode::invalid_argument, "confusion matrix needs at least one class");
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int c = 0; c < num_classes(); ++c) t += counts[c][c];
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> truths,
                                 int num_classes) {
  require(predictions.size() == truths.size(), ErrorCode::shape_mismatch,
          "confusion_matrix: predictions and truths differ in length");
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i], p = predictions[i];
    require(t >= 0 && t < num_classes && p >= 0 && p < num_classes, ErrorCode::invalid_argument,
            "confusion_matrix: label outside the class range at index " + std::to_string(i));
    ++cm.counts[t][p];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

ClassificationReport report(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  for (const auto& row : cm.counts) {
    require(static_cast<int>(row.size()) == k, ErrorCode::shape_mismatch,
            "report: confusion matrix is not square");
    for (auto v : row) require(v >= 0, ErrorCode::invalid_argument, "report: negative count");
  }
  const std::int64_t total = cm.total();
  require(total > 0, ErrorCode::invalid_argument, "report: empty confusion matrix");

  ClassificationReport r;
  r.all.name = "All";
  for (int c = 0; c < k; ++c) {
    std::int64_t tp = cm.counts[c][c], fp = 0, fn = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.counts[o][c];
      fn += cm.counts[c][o];
    }
    const std::int64_t tn = total - tp - fp - fn;
    ClassMetrics m;
    m.name = display_name(c);
    m.support = tp + fn;
    m.precision = ratio(tp, tp + fp, m.degenerate);
    m.recall = ratio(tp, tp + fn, m.degenerate);
    if (m.precision + m.recall == 0) m.degenerate = true;
    m.f1 = f1_score(m.precision, m.recall);
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    r.all.precision += m.precision / k;
    r.all.recall += m.recall / k;
    r.all.f1 += m.f1 / k;
    r.all.degenerate = r.all.degenerate || m.degenerate;
    r.classes.push_back(m);
  }
  r.all.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  r.all.support = total;
  return r;
}

std::string report_to_json(const ClassificationReport& r) {
  json classes = json::array();
  for (const auto& m : r.classes) classes.push_back(metrics_json(m));
  return json{{"classes", classes}, {"all", metrics_json(r.all)}}.dump(2);
}

std::string report_to_text(const ClassificationReport& r) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %9s %10s %7s %5s %5s\n", "Class", "Accuracy", "Precision",
                "Recall", "F1", "N");
  out << line;
  auto row = [&](const ClassMetrics& m) {
    std::snprintf(line, sizeof line, "%-10s %9.2f %10.2f %7.2f %5.2f %5lld%s\n", m.name.c_str(),
                  m.accuracy, m.precision, m.recall, m.f1, static_cast<long long>(m.support),
                  m.degenerate ? " *" : "");
    out << line;
  };
  for (const auto& m : r.classes) row(m);
  row(r.all);
  return out.str();
}

}  // namespace gprlab::eval
