#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gprlab/clf/classifier.hpp"
#include "gprlab/core/bscan.hpp"

namespace gprlab::clf {

/// Which input the classifier reads: one time image, one frequency image,
/// or both through the combined model.
enum class ClassifierKind { time, frequency, combined };

std::string_view to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(std::string_view name);

struct ClassifierTrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 30;
  double aux_branch_weight = 0.0;  // > 0 enables the combined model's branch heads
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;  // used by callers that split one labeled pool

  void validate() const;
  bool operator==(const ClassifierTrainConfig&) const = default;
};

std::string classifier_config_to_json(const ClassifierTrainConfig& cfg);
/// Rejects unknown keys; missing keys keep their defaults.
ClassifierTrainConfig classifier_config_from_json(const std::string& text);

/// One labeled example. `frequency` is required by the frequency and
/// combined kinds.
struct ClassifierSample {
  RadarImage time;
  std::optional<RadarImage> frequency;
  int label = 0;
};

class ClassifierModel {
 public:
  ClassifierModel(ClassifierKind kind, const ClassifierSpec& spec, bool aux_heads);

  ClassifierKind kind() const { return kind_; }
  const ClassifierSpec& spec() const { return spec_; }
  bool aux_heads() const { return combined_ && combined_->has_aux_heads(); }

  void init(std::uint64_t seed);
  /// Class probabilities (n, num_classes).
  Tensor<float> predict_proba(std::span<const ClassifierSample> samples);
  std::vector<int> predict(std::span<const ClassifierSample> samples);
  /// Forward and backward over one batch; accumulates gradients and returns
  /// the main cross entropy plus aux_weight times the branch losses.
  double accumulate_gradients(std::span<const ClassifierSample> batch, double aux_weight);
  std::vector<Param<float>*> params();

  SingleClassifier<float>* single() { return single_.get(); }
  CombinedClassifier<float>* combined() { return combined_.get(); }

 private:
  ClassifierKind kind_;
  ClassifierSpec spec_;
  std::unique_ptr<SingleClassifier<float>> single_;
  std::unique_ptr<CombinedClassifier<float>> combined_;
};

struct ClassifierLogRow {
  int epoch = 0;
  std::int64_t step = 0;
  double train_loss = 0;
  double train_accuracy = 0;
  double val_loss = 0;
  double val_accuracy = 0;
};

struct ClassifierTrainResult {
  std::unique_ptr<ClassifierModel> model;
  std::vector<ClassifierLogRow> log;
  int best_epoch = 0;
};

/// Adam on mean cross entropy, shuffled minibatches each epoch. Returns the
/// parameters of the epoch with the best validation accuracy (ties go to the
/// lower validation loss, then the earlier epoch).
ClassifierTrainResult train_classifier(std::span<const ClassifierSample> train,
                                       std::span<const ClassifierSample> val, ClassifierKind kind,
                                       const ClassifierSpec& spec,
                                       const ClassifierTrainConfig& cfg);

double accuracy(const std::vector<int>& predictions, std::span<const ClassifierSample> samples);

void save_classifier(ClassifierModel& model, const std::filesystem::path& dir);
std::unique_ptr<ClassifierModel> load_classifier(const std::filesystem::path& dir);

void write_classifier_log(const std::filesystem::path& path,
                          const std::vector<ClassifierLogRow>& rows);
/// CSV with header sample_id,p_concrete,p_metallic,p_pvc,argmax.
void write_predictions_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                           const Tensor<float>& probs);

}  // namespace gprlab::clf
