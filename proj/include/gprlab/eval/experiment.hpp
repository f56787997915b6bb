#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gprlab/clf/train.hpp"
#include "gprlab/core/dataset.hpp"
#include "gprlab/eval/metrics.hpp"
#include "gprlab/freq/stft.hpp"

namespace gprlab::eval {

/// Inputs of a before/after augmentation comparison. All images are
/// time-domain; frequency inputs are derived with `freq_config`.
struct ExperimentPlan {
  std::vector<LabeledImage> real_train;
  std::vector<LabeledImage> augmentation;  // generated, labeled
  std::vector<LabeledImage> test;
  std::vector<clf::ClassifierKind> kinds{clf::ClassifierKind::time, clf::ClassifierKind::frequency,
                                         clf::ClassifierKind::combined};
  std::vector<std::uint64_t> seeds{0};
  clf::ClassifierTrainConfig train_config;
  freq::SpectrogramConfig freq_config;
};

struct PairedReport {
  clf::ClassifierKind kind = clf::ClassifierKind::time;
  std::uint64_t seed = 0;
  ClassificationReport before;
  ClassificationReport after;
};

struct ChartRow {
  std::string scenario;
  std::string class_name;
  std::string metric;
  double before = 0;
  double after = 0;
  double delta = 0;
};

struct ExperimentResult {
  std::vector<PairedReport> runs;
  std::vector<std::string> test_hashes;
  /// One row per scenario x class x metric; values are medians over seeds.
  std::vector<ChartRow> chart;
};

/// Per-class split of item indices: round(fraction * class size) items of
/// each class go to `picked` (at least one and at most size - 1 when a class
/// has two or more items), the rest to `rest`. Both keep ascending order.
struct Split {
  std::vector<std::size_t> rest;
  std::vector<std::size_t> picked;
};
Split stratified_split(const std::vector<int>& labels, double fraction, std::uint64_t seed);

/// Real training images are split per class into train and validation
/// (validation_fraction, seeded); generated images join the training split
/// only for the "after" run. Every run is evaluated on the same test set.
/// Raises leakage if any test image is bit-identical to a training or
/// generated image.
ExperimentResult run_augmentation_experiment(const ExperimentPlan& plan);

/// Median over seeds of the macro f1 for one scenario.
double median_macro_f1(const ExperimentResult& result, clf::ClassifierKind kind, bool after);

std::string experiment_to_json(const ExperimentResult& result);
/// Before and after tables per scenario and seed.
std::string experiment_to_text(const ExperimentResult& result);
void write_chart_csv(const std::filesystem::path& path, const std::vector<ChartRow>& rows);

}  // namespace gprlab::eval
