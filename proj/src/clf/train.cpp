#include "gprlab/clf/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gprlab/core/error.hpp"
#include "gprlab/nn/adam.hpp"
#include "gprlab/nn/blob_io.hpp"
#include "gprlab/sim/random_field.hpp"

namespace gprlab::clf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::uint64_t kInitSalt = 0x636c66696e6974;
constexpr std::uint64_t kShuffleSalt = 0x636c6673687566;
constexpr int kEvalChunk = 64;

void check_sample(const ClassifierSample& s, ClassifierKind kind, const ClassifierSpec& spec) {
  require(s.label >= 0 && s.label < spec.num_classes, ErrorCode::invalid_argument,
          "classifier: label " + std::to_string(s.label) + " outside the class range");
  auto check_image = [&](const RadarImage& img, DomainTag want, const char* what) {
    require(img.rows() == spec.image_size && img.cols() == spec.image_size,
            ErrorCode::shape_mismatch,
            std::string("classifier: ") + what + " image must be " +
                std::to_string(spec.image_size) + "x" + std::to_string(spec.image_size));
    require(img.domain == want, ErrorCode::invalid_argument,
            std::string("classifier: ") + what + " input has the wrong domain tag");
  };
  if (kind != ClassifierKind::frequency) check_image(s.time, DomainTag::time, "time");
  if (kind != ClassifierKind::time) {
    require(s.frequency.has_value(), ErrorCode::invalid_argument,
            "classifier: frequency image missing");
    check_image(*s.frequency, DomainTag::frequency, "frequency");
  }
}

Tensor<float> stack(std::span<const ClassifierSample> samples, bool frequency, int size) {
  Tensor<float> t(static_cast<int>(samples.size()), 1, size, size);
  const std::size_t count = static_cast<std::size_t>(size) * size;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const RadarImage& img = frequency ? *samples[i].frequency : samples[i].time;
    std::copy_n(img.pixels.data(), count, t.sample(static_cast<int>(i)));
  }
  return t;
}

std::vector<int> labels_of(std::span<const ClassifierSample> samples) {
  std::vector<int> y;
  y.reserve(samples.size());
  for (const auto& s : samples) y.push_back(s.label);
  return y;
}

std::vector<int> argmax_rows(const Tensor<float>& p) {
  std::vector<int> out(p.n);
  const int k = static_cast<int>(p.sample_size());
  for (int i = 0; i < p.n; ++i) {
    const float* row = p.sample(i);
    out[i] = static_cast<int>(std::max_element(row, row + k) - row);
  }
  return out;
}

double mean_cross_entropy(const Tensor<float>& probs, const std::vector<int>& labels) {
  double loss = 0;
  for (int i = 0; i < probs.n; ++i) {
    loss -= std::log(std::max<double>(probs.sample(i)[labels[i]], nn::kLogClamp));
  }
  return probs.n ? loss / probs.n : 0.0;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::time: return "time";
    case ClassifierKind::frequency: return "frequency";
    case ClassifierKind::combined: return "combined";
  }
  return "time";
}

ClassifierKind classifier_kind_from_string(std::string_view name) {
  if (name == "time") return ClassifierKind::time;
  if (name == "frequency") return ClassifierKind::frequency;
  if (name == "combined") return ClassifierKind::combined;
  fail(ErrorCode::invalid_argument, "unknown classifier kind: " + std::string(name));
}

void ClassifierTrainConfig::validate() const {
  require(learning_rate > 0 && std::isfinite(learning_rate), ErrorCode::config_error,
          "classifier: learning_rate must be positive");
  require(batch_size > 0, ErrorCode::config_error, "classifier: batch_size must be positive");
  require(epochs > 0, ErrorCode::config_error, "classifier: epochs must be positive");
  require(aux_branch_weight >= 0, ErrorCode::config_error,
          "classifier: aux_branch_weight must be >= 0");
  require(validation_fraction > 0 && validation_fraction < 1, ErrorCode::config_error,
          "classifier: validation_fraction must lie in (0, 1)");
}

std::string classifier_config_to_json(const ClassifierTrainConfig& cfg) {
  json j{{"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size},
         {"epochs", cfg.epochs},               {"aux_branch_weight", cfg.aux_branch_weight},
         {"seed", cfg.seed},                   {"validation_fraction", cfg.validation_fraction}};
  return j.dump();
}

ClassifierTrainConfig classifier_config_from_json(const std::string& text) {
  ClassifierTrainConfig cfg;
  json j;
  try {
    j = json::parse(text);
    if (!j.is_object()) fail(ErrorCode::config_error, "classifier config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "learning_rate") cfg.learning_rate = value.get<double>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "epochs") cfg.epochs = value.get<int>();
      else if (key == "aux_branch_weight") cfg.aux_branch_weight = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "validation_fraction") cfg.validation_fraction = value.get<double>();
      else fail(ErrorCode::config_error, "classifier config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config_error, std::string("classifier config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ClassifierModel::ClassifierModel(ClassifierKind kind, const ClassifierSpec& spec, bool aux_heads)
    : kind_(kind), spec_(spec) {
  if (kind == ClassifierKind::combined) {
    combined_ = std::make_unique<CombinedClassifier<float>>(spec, aux_heads);
  } else {
    single_ = std::make_unique<SingleClassifier<float>>(spec);
  }
}

void ClassifierModel::init(std::uint64_t seed) {
  std::mt19937_64 rng(sim::splitmix64(seed ^ kInitSalt));
  if (single_) single_->init(rng);
  else combined_->init(rng);
}

Tensor<float> ClassifierModel::predict_proba(std::span<const ClassifierSample> samples) {
  Tensor<float> out(static_cast<int>(samples.size()), spec_.num_classes);
  for (std::size_t start = 0; start < samples.size(); start += kEvalChunk) {
    const auto chunk = samples.subspan(start, std::min<std::size_t>(kEvalChunk, samples.size() - start));
    for (const auto& s : chunk) check_sample(s, kind_, spec_);
    Tensor<float> logits;
    if (single_) {
      logits = single_->forward(stack(chunk, kind_ == ClassifierKind::frequency, spec_.image_size));
    } else {
      logits = combined_->forward(stack(chunk, false, spec_.image_size),
                                  stack(chunk, true, spec_.image_size))
                   .logits;
    }
    const Tensor<float> p = nn::softmax(logits);
    std::copy(p.data.begin(), p.data.end(), out.sample(static_cast<int>(start)));
  }
  return out;
}

std::vector<int> ClassifierModel::predict(std::span<const ClassifierSample> samples) {
  return argmax_rows(predict_proba(samples));
}

double ClassifierModel::accumulate_gradients(std::span<const ClassifierSample> batch,
                                             double aux_weight) {
  for (const auto& s : batch) check_sample(s, kind_, spec_);
  const std::vector<int> y = labels_of(batch);
  Tensor<float> dlogits;
  if (single_) {
    const Tensor<float> logits =
        single_->forward(stack(batch, kind_ == ClassifierKind::frequency, spec_.image_size));
    const double loss = nn::softmax_cross_entropy(logits, y, &dlogits);
    single_->backward(dlogits);
    return loss;
  }
  const auto out = combined_->forward(stack(batch, false, spec_.image_size),
                                      stack(batch, true, spec_.image_size));
  double loss = nn::softmax_cross_entropy(out.logits, y, &dlogits);
  if (out.aux_time && aux_weight > 0) {
    Tensor<float> dt, df;
    loss += aux_weight * nn::softmax_cross_entropy(*out.aux_time, y, &dt);
    loss += aux_weight * nn::softmax_cross_entropy(*out.aux_freq, y, &df);
    for (auto& v : dt.data) v *= static_cast<float>(aux_weight);
    for (auto& v : df.data) v *= static_cast<float>(aux_weight);
    combined_->backward(dlogits, &dt, &df);
  } else {
    combined_->backward(dlogits, nullptr, nullptr);
  }
  return loss;
}

std::vector<Param<float>*> ClassifierModel::params() {
  return single_ ? single_->params() : combined_->params();
}

double accuracy(const std::vector<int>& predictions, std::span<const ClassifierSample> samples) {
  require(predictions.size() == samples.size(), ErrorCode::shape_mismatch,
          "accuracy: prediction count does not match sample count");
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) hits += predictions[i] == samples[i].label;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

ClassifierTrainResult train_classifier(std::span<const ClassifierSample> train,
                                       std::span<const ClassifierSample> val, ClassifierKind kind,
                                       const ClassifierSpec& spec,
                                       const ClassifierTrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  require(!train.empty(), ErrorCode::invalid_argument, "train_classifier: training split is empty");
  require(!val.empty(), ErrorCode::invalid_argument, "train_classifier: validation split is empty");
  for (const auto& s : train) check_sample(s, kind, spec);
  for (const auto& s : val) check_sample(s, kind, spec);

  ClassifierTrainResult result;
  result.model = std::make_unique<ClassifierModel>(kind, spec, cfg.aux_branch_weight > 0);
  ClassifierModel& model = *result.model;
  model.init(cfg.seed);
  nn::AdamConfig acfg;
  acfg.learning_rate = cfg.learning_rate;
  acfg.beta1 = 0.9;
  acfg.beta2 = 0.999;
  acfg.epsilon = 1e-7;
  nn::Adam<float> opt(model.params(), acfg);

  const std::vector<int> val_labels = labels_of(val);
  std::vector<std::size_t> order(train.size());
  std::vector<ClassifierSample> batch;
  std::vector<nn::Buffer<float>> best;
  double best_acc = -1, best_loss = 0;
  std::int64_t step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(sim::splitmix64((cfg.seed ^ kShuffleSalt) + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train[order[k]]);
      opt.zero_grad();
      const double loss = model.accumulate_gradients(batch, cfg.aux_branch_weight);
      if (!std::isfinite(loss)) {
        fail(ErrorCode::numerical_abort,
             "train_classifier: non-finite loss at step " + std::to_string(step));
      }
      opt.step();
      loss_sum += loss * static_cast<double>(end - start);
      ++step;
    }
    ClassifierLogRow row;
    row.epoch = epoch;
    row.step = step;
    row.train_loss = loss_sum / static_cast<double>(train.size());
    row.train_accuracy = accuracy(model.predict(train), train);
    const Tensor<float> pv = model.predict_proba(val);
    row.val_loss = mean_cross_entropy(pv, val_labels);
    row.val_accuracy = accuracy(argmax_rows(pv), val);
    result.log.push_back(row);
    if (row.val_accuracy > best_acc || (row.val_accuracy == best_acc && row.val_loss < best_loss)) {
      best_acc = row.val_accuracy;
      best_loss = row.val_loss;
      result.best_epoch = epoch;
      best.clear();
      for (auto* p : model.params()) best.push_back(p->value);
    }
  }
  auto params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  return result;
}

void save_classifier(ClassifierModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  const auto params = model.params();
  nn::save_params(dir, params);
  json j;
  j["format"] = "gprlab-classifier-checkpoint";
  j["version"] = kCheckpointVersion;
  j["dtype"] = "float32";
  j["endianness"] = "little";
  j["kind"] = std::string(to_string(model.kind()));
  j["image_size"] = model.spec().image_size;
  j["leaky_slope"] = model.spec().leaky_slope;
  j["num_classes"] = model.spec().num_classes;
  j["aux_heads"] = model.aux_heads();
  json list = json::array();
  for (const auto* p : params) {
    list.push_back({{"name", p->name}, {"shape", p->shape}, {"file", p->name + ".bin"}});
  }
  j["tensors"] = list;
  std::ofstream out(dir / "model.json");
  if (!out) fail(ErrorCode::io_error, "cannot write " + (dir / "model.json").string());
  out << j.dump(2) << '\n';
}

std::unique_ptr<ClassifierModel> load_classifier(const fs::path& dir) {
  const fs::path meta = dir / "model.json";
  std::ifstream in(meta);
  if (!in) fail(ErrorCode::missing_sample, "classifier checkpoint not found: " + meta.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const json j = json::parse(ss.str());
    if (j.value("format", "") != "gprlab-classifier-checkpoint") {
      fail(ErrorCode::parse_error, meta.string() + ": not a classifier checkpoint");
    }
    if (j.value("version", -1) != kCheckpointVersion) {
      fail(ErrorCode::unknown_version, meta.string() + ": unsupported checkpoint version");
    }
    ClassifierSpec spec;
    spec.image_size = j.at("image_size").get<int>();
    spec.leaky_slope = j.at("leaky_slope").get<double>();
    spec.num_classes = j.at("num_classes").get<int>();
    auto model = std::make_unique<ClassifierModel>(
        classifier_kind_from_string(j.at("kind").get<std::string>()), spec,
        j.at("aux_heads").get<bool>());
    nn::load_params(dir, model->params());
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, meta.string() + ": " + e.what());
  }
}

void write_classifier_log(const fs::path& path, const std::vector<ClassifierLogRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << "epoch,step,train_loss,train_accuracy,val_loss,val_accuracy\n";
  out.precision(9);
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.step << ',' << r.train_loss << ',' << r.train_accuracy << ','
        << r.val_loss << ',' << r.val_accuracy << '\n';
  }
}

void write_predictions_csv(const fs::path& path, const std::vector<std::string>& ids,
                           const Tensor<float>& probs) {
  require(static_cast<int>(ids.size()) == probs.n && probs.sample_size() == kNumClasses,
          ErrorCode::shape_mismatch, "write_predictions_csv: ids and probabilities disagree");
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << "sample_id,p_concrete,p_metallic,p_pvc,argmax\n";
  out.precision(9);
  const auto arg = argmax_rows(probs);
  for (int i = 0; i < probs.n; ++i) {
    const float* p = probs.sample(i);
    out << ids[i] << ',' << p[0] << ',' << p[1] << ',' << p[2] << ','
        << class_name(class_from_id(arg[i])) << '\n';
  }
}

}  // namespace gprlab::clf
