#include "gprlab/eval/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gprlab/core/error.hpp"
#include "gprlab/core/hash.hpp"
#include "gprlab/freq/frequency_bscan.hpp"
#include "gprlab/sim/random_field.hpp"

namespace gprlab::eval {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitSalt = 0x65787073706c6974;
const char* const kMetrics[] = {"accuracy", "precision", "recall", "f1"};

std::vector<clf::ClassifierSample> to_samples(const std::vector<LabeledImage>& items,
                                              bool with_frequency,
                                              const freq::SpectrogramConfig& cfg,
                                              const char* what) {
  std::vector<clf::ClassifierSample> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    require(item.label.has_value(), ErrorCode::invalid_argument,
            std::string("experiment: unlabeled image in ") + what);
    require(item.image.domain == DomainTag::time, ErrorCode::invalid_argument,
            std::string("experiment: ") + what + " images must be time-domain");
    clf::ClassifierSample s;
    s.time = item.image;
    s.label = class_id(*item.label);
    if (with_frequency) s.frequency = freq::frequency_bscan(item.image, cfg).image;
    out.push_back(std::move(s));
  }
  return out;
}

double metric(const ClassMetrics& m, const std::string& name) {
  if (name == "accuracy") return m.accuracy;
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  return m.f1;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

json class_metrics_json(const ClassMetrics& m) {
  return {{"class", m.name},   {"accuracy", m.accuracy}, {"precision", m.precision},
          {"recall", m.recall}, {"f1", m.f1},             {"support", m.support},
          {"degenerate", m.degenerate}};
}

json report_json(const ClassificationReport& r) {
  json classes = json::array();
  for (const auto& m : r.classes) classes.push_back(class_metrics_json(m));
  return {{"classes", classes}, {"all", class_metrics_json(r.all)}};
}

std::string scenario_title(clf::ClassifierKind kind) {
  switch (kind) {
    case clf::ClassifierKind::time: return "Baseline Object Detection Performance";
    case clf::ClassifierKind::frequency: return "Frequency Object Detection Performance";
    case clf::ClassifierKind::combined: return "Combined Object Detection Performance";
  }
  return "";
}

}  // namespace

Split stratified_split(const std::vector<int>& labels, double fraction, std::uint64_t seed) {
  require(fraction >= 0 && fraction <= 1, ErrorCode::invalid_argument,
          "stratified_split: fraction must lie in [0, 1]");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(sim::splitmix64(seed));
  Split split;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    if (idx.size() >= 2 && fraction > 0) n = std::clamp<std::size_t>(n, 1, idx.size() - 1);
    else if (idx.size() < 2) n = 0;
    split.picked.insert(split.picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
    split.rest.insert(split.rest.end(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end());
  }
  std::sort(split.picked.begin(), split.picked.end());
  std::sort(split.rest.begin(), split.rest.end());
  return split;
}

ExperimentResult run_augmentation_experiment(const ExperimentPlan& plan) {
  require(!plan.real_train.empty(), ErrorCode::invalid_argument, "experiment: no real training images");
  require(!plan.test.empty(), ErrorCode::invalid_argument, "experiment: no test images");
  require(!plan.kinds.empty() && !plan.seeds.empty(), ErrorCode::invalid_argument,
          "experiment: need at least one classifier kind and one seed");
  plan.train_config.validate();

  ExperimentResult result;
  std::set<std::string> train_hashes;
  for (const auto& item : plan.real_train) train_hashes.insert(image_hash(item.image));
  for (const auto& item : plan.augmentation) train_hashes.insert(image_hash(item.image));
  for (std::size_t i = 0; i < plan.test.size(); ++i) {
    std::string h = image_hash(plan.test[i].image);
    if (train_hashes.count(h)) {
      fail(ErrorCode::leakage, "experiment: test image " + std::to_string(i) +
                                   " also appears in the training data (sha256 " + h + ")");
    }
    result.test_hashes.push_back(std::move(h));
  }

  const bool need_freq = std::any_of(plan.kinds.begin(), plan.kinds.end(), [](auto k) {
    return k != clf::ClassifierKind::time;
  });
  const auto real = to_samples(plan.real_train, need_freq, plan.freq_config, "real training set");
  const auto aug = to_samples(plan.augmentation, need_freq, plan.freq_config, "augmentation set");
  const auto test = to_samples(plan.test, need_freq, plan.freq_config, "test set");
  const int size = real.front().time.rows();
  clf::ClassifierSpec spec;
  spec.image_size = size;

  std::vector<int> truths;
  for (const auto& s : test) truths.push_back(s.label);

  for (const std::uint64_t seed : plan.seeds) {
    std::vector<int> real_labels;
    for (const auto& r : real) real_labels.push_back(r.label);
    const Split split =
        stratified_split(real_labels, plan.train_config.validation_fraction, seed ^ kSplitSalt);
    std::vector<clf::ClassifierSample> train, val;
    for (auto i : split.rest) train.push_back(real[i]);
    for (auto i : split.picked) val.push_back(real[i]);
    require(!val.empty(), ErrorCode::invalid_argument,
            "experiment: too few real training images for a validation split");
    std::vector<clf::ClassifierSample> augmented = train;
    augmented.insert(augmented.end(), aug.begin(), aug.end());

    clf::ClassifierTrainConfig cfg = plan.train_config;
    cfg.seed = seed;
    for (const auto kind : plan.kinds) {
      PairedReport pr;
      pr.kind = kind;
      pr.seed = seed;
      auto before = clf::train_classifier(train, val, kind, spec, cfg);
      pr.before = report(confusion_matrix(before.model->predict(test), truths));
      auto after = clf::train_classifier(augmented, val, kind, spec, cfg);
      pr.after = report(confusion_matrix(after.model->predict(test), truths));
      result.runs.push_back(std::move(pr));
    }
  }

  for (const auto kind : plan.kinds) {
    for (int c = 0; c < kNumClasses; ++c) {
      for (const char* name : kMetrics) {
        std::vector<double> b, a;
        for (const auto& run : result.runs) {
          if (run.kind != kind) continue;
          b.push_back(metric(run.before.classes[c], name));
          a.push_back(metric(run.after.classes[c], name));
        }
        ChartRow row;
        row.scenario = std::string(clf::to_string(kind));
        row.class_name = std::string(class_name(class_from_id(c)));
        row.metric = name;
        row.before = median(b);
        row.after = median(a);
        row.delta = row.after - row.before;
        result.chart.push_back(row);
      }
    }
  }
  return result;
}

double median_macro_f1(const ExperimentResult& result, clf::ClassifierKind kind, bool after) {
  std::vector<double> v;
  for (const auto& run : result.runs) {
    if (run.kind == kind) v.push_back(after ? run.after.all.f1 : run.before.all.f1);
  }
  require(!v.empty(), ErrorCode::invalid_argument, "median_macro_f1: scenario was not run");
  return median(std::move(v));
}

std::string experiment_to_json(const ExperimentResult& result) {
  json runs = json::array();
  for (const auto& run : result.runs) {
    json deltas = json::object();
    for (std::size_t c = 0; c <= run.before.classes.size(); ++c) {
      const ClassMetrics& b = c < run.before.classes.size() ? run.before.classes[c] : run.before.all;
      const ClassMetrics& a = c < run.after.classes.size() ? run.after.classes[c] : run.after.all;
      json d;
      for (const char* name : kMetrics) d[name] = metric(a, name) - metric(b, name);
      deltas[b.name] = d;
    }
    runs.push_back({{"scenario", std::string(clf::to_string(run.kind))},
                    {"seed", run.seed},
                    {"before", report_json(run.before)},
                    {"after", report_json(run.after)},
                    {"delta", deltas}});
  }
  json chart = json::array();
  for (const auto& r : result.chart) {
    chart.push_back({{"scenario", r.scenario}, {"class", r.class_name}, {"metric", r.metric},
                     {"before", r.before},     {"after", r.after},      {"delta", r.delta}});
  }
  return json{{"runs", runs}, {"test_hashes", result.test_hashes}, {"chart", chart}}.dump(2);
}

std::string experiment_to_text(const ExperimentResult& result) {
  std::ostringstream out;
  for (const auto& run : result.runs) {
    out << scenario_title(run.kind) << " (seed " << run.seed << ")\n\n";
    out << "Before Augmentation\n" << report_to_text(run.before) << '\n';
    out << "After Augmentation\n" << report_to_text(run.after) << '\n';
  }
  return out.str();
}

void write_chart_csv(const std::filesystem::path& path, const std::vector<ChartRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << "scenario,class,metric,before,after,delta\n";
  out.precision(9);
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.class_name << ',' << r.metric << ',' << r.before << ','
        << r.after << ',' << r.delta << '\n';
  }
}

}  // namespace gprlab::eval
