#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "architecture_tables.hpp"
#include "gprlab/clf/classifier.hpp"
#include "gprlab/clf/train.hpp"
#include "gprlab/core/error.hpp"
#include "gradcheck.hpp"

using namespace gprlab;
using namespace gprlab::clf;
using gprlab::testing::check_param_gradients;
using gprlab::testing::dot;
using gprlab::testing::random_weights;

namespace {

Tensor<double> random_images(int n, int size, std::uint64_t seed) {
  Tensor<double> t(n, 1, size, size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : t.data) v = u(rng);
  return t;
}

ClassifierSpec small_spec(int size) {
  ClassifierSpec s;
  s.image_size = size;
  return s;
}

RadarImage level_image(int size, float level, float noise, std::mt19937_64& rng, DomainTag tag) {
  std::normal_distribution<float> nd(0.0f, noise);
  RadarImage img;
  img.domain = tag;
  img.pixels = ImageRM(size, size);
  for (int i = 0; i < size * size; ++i) img.pixels.data()[i] = std::clamp(level + nd(rng), -1.0f, 1.0f);
  return img;
}

std::vector<ClassifierSample> separable(int per_class, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ClassifierSample> out;
  for (int k = 0; k < per_class; ++k) {
    for (int c = 0; c < 3; ++c) {
      ClassifierSample s;
      s.time = level_image(size, -0.7f + 0.7f * c, 0.1f, rng, DomainTag::time);
      s.frequency = level_image(size, 0.7f - 0.7f * c, 0.1f, rng, DomainTag::frequency);
      s.label = c;
      out.push_back(std::move(s));
    }
  }
  return out;
}

void set_constant_trunk(Trunk<double>& t, double level) {
  for (auto* p : t.params()) std::fill(p->value.begin(), p->value.end(), 0.0);
  std::fill(t.conv0.bias.value.begin(), t.conv0.bias.value.end(), 1.0);
  std::fill(t.conv1.bias.value.begin(), t.conv1.bias.value.end(), level);
}

}  // namespace

TEST(Architecture, SingleClassifierMatchesReferenceTable) {
  SingleClassifier<float> c(ClassifierSpec{});
  std::vector<nn::ShapeRecord> trace;
  c.forward(Tensor<float>(1, 1, 256, 256), &trace);
  EXPECT_EQ(gprlab::testing::compare_trace(trace, gprlab::testing::kSingleClassifierTable), "");
}

TEST(Architecture, CombinedClassifierMatchesReferenceTable) {
  CombinedClassifier<float> c(ClassifierSpec{}, false);
  std::vector<nn::ShapeRecord> trace;
  c.forward(Tensor<float>(1, 1, 256, 256), Tensor<float>(1, 1, 256, 256), &trace);
  EXPECT_EQ(gprlab::testing::compare_trace(trace, gprlab::testing::kCombinedClassifierTable), "");
  EXPECT_EQ(ClassifierSpec{}.flatten_size(), 16384);
}

TEST(Architecture, OddSizesRoundUp) {
  EXPECT_EQ(small_spec(15).trunk_size(), 4);
  EXPECT_EQ(small_spec(16).trunk_size(), 4);
  EXPECT_EQ(small_spec(17).trunk_size(), 5);
}

TEST(Outputs, ProbabilitiesOnSimplex) {
  ClassifierModel m(ClassifierKind::combined, small_spec(16), false);
  m.init(1);
  const auto data = separable(4, 16, 2);
  const auto p = m.predict_proba(data);
  ASSERT_EQ(p.n, 12);
  for (int i = 0; i < p.n; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(p.sample(i)[j], 0.0f);
      s += p.sample(i)[j];
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Outputs, ZeroWeightsGiveUniform) {
  ClassifierModel m(ClassifierKind::time, small_spec(16), false);
  for (auto* p : m.params()) std::fill(p->value.begin(), p->value.end(), 0.0f);
  const auto p = m.predict_proba(separable(2, 16, 3));
  for (float v : p.data) EXPECT_NEAR(v, 1.0f / 3.0f, 1e-7f);
}

TEST(CrossEntropy, Examples) {
  Tensor<double> uniform(1, 3, 1, 1, 1.0 / 3.0), one_hot(1, 3);
  one_hot.data = {0, 1, 0};
  EXPECT_NEAR(cross_entropy(uniform, one_hot), std::log(3.0), 1e-12);
  Tensor<double> p(1, 3);
  p.data = {0.1, 0.7, 0.2};
  EXPECT_NEAR(cross_entropy(p, one_hot), -std::log(0.7), 1e-12);
  Tensor<double> zero(1, 3);
  zero.data = {1.0, 0.0, 0.0};
  EXPECT_NEAR(cross_entropy(zero, one_hot), -std::log(1e-12), 1e-9);
}

TEST(Combined, OnesFrequencyBranchReducesToSingle) {
  const auto spec = small_spec(16);
  SingleClassifier<double> single(spec);
  CombinedClassifier<double> combined(spec, false);
  std::mt19937_64 rng(4);
  single.init(rng);
  const auto sp = single.params();
  // time trunk + head take the single classifier's weights
  auto tp = combined.time_trunk.params();
  for (std::size_t i = 0; i < tp.size(); ++i) tp[i]->value = sp[i]->value;
  combined.head.weight.value = single.head.weight.value;
  combined.head.bias.value = single.head.bias.value;
  set_constant_trunk(combined.freq_trunk, 1.0);
  const auto xt = random_images(3, 16, 5), xf = random_images(3, 16, 6);
  const auto a = single.forward(xt);
  const auto b = combined.forward(xt, xf).logits;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-12);
}

TEST(Combined, MultiplyScalingCancels) {
  const auto spec = small_spec(16);
  CombinedClassifier<double> combined(spec, false);
  std::mt19937_64 rng(7);
  combined.init(rng);
  const auto xt = random_images(2, 16, 8), xf = random_images(2, 16, 9);
  set_constant_trunk(combined.freq_trunk, 1.0);
  const auto base = combined.forward(xt, xf).logits;
  for (double c : {0.25, 3.0}) {
    CombinedClassifier<double> scaled(spec, false);
    auto src = combined.params();
    auto dst = scaled.params();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value;
    set_constant_trunk(scaled.freq_trunk, c);
    for (auto& w : scaled.head.weight.value) w /= c;
    const auto y = scaled.forward(xt, xf).logits;
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y.data[i], base.data[i], 1e-12);
  }
}

TEST(Gradients, SingleClassifier) {
  SingleClassifier<double> c(small_spec(32));
  std::mt19937_64 rng(10);
  c.init(rng);
  for (auto* p : c.params())
    for (auto& v : p->value) v += 0.1 * std::normal_distribution<double>()(rng);
  const auto x = random_images(3, 32, 11);
  const std::vector<int> labels{0, 1, 2};
  auto loss = [&] { return nn::softmax_cross_entropy(c.forward(x), labels, static_cast<Tensor<double>*>(nullptr)); };
  for (auto* p : c.params()) p->zero_grad();
  Tensor<double> d;
  nn::softmax_cross_entropy(c.forward(x), labels, &d);
  c.backward(d);
  const auto r = check_param_gradients(c.params(), loss, 60, 12);
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(Gradients, CombinedClassifierWithBranchHeads) {
  CombinedClassifier<double> c(small_spec(32), true);
  std::mt19937_64 rng(13);
  c.init(rng);
  for (auto* p : c.params())
    for (auto& v : p->value) v += 0.1 * std::normal_distribution<double>()(rng);
  const auto xt = random_images(2, 32, 14), xf = random_images(2, 32, 15);
  const auto w = random_weights(6, 16), wa = random_weights(6, 17), wb = random_weights(6, 18);
  auto loss = [&] {
    const auto o = c.forward(xt, xf);
    return dot(w, o.logits.data) + dot(wa, o.aux_time->data) + dot(wb, o.aux_freq->data);
  };
  for (auto* p : c.params()) p->zero_grad();
  const auto o = c.forward(xt, xf);
  Tensor<double> dl = o.logits, da = *o.aux_time, db = *o.aux_freq;
  dl.data = w;
  da.data = wa;
  db.data = wb;
  c.backward(dl, &da, &db);
  const auto r = check_param_gradients(c.params(), loss, 80, 19);
  EXPECT_GE(r.checked, 200);
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(Training, SeparableToyReachesPerfectAccuracy) {
  const auto train = separable(8, 16, 20);
  const auto val = separable(3, 16, 21);
  ClassifierTrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 60;  // 3 batches per epoch, 180 steps
  cfg.learning_rate = 1e-2;
  for (auto kind : {ClassifierKind::time, ClassifierKind::frequency, ClassifierKind::combined}) {
    const auto r = train_classifier(train, val, kind, small_spec(16), cfg);
    EXPECT_LE(r.log.back().step, 200);
    EXPECT_DOUBLE_EQ(accuracy(r.model->predict(train), train), 1.0) << to_string(kind);
    EXPECT_DOUBLE_EQ(accuracy(r.model->predict(val), val), 1.0) << to_string(kind);
  }
}

TEST(Training, Deterministic) {
  const auto train = separable(4, 16, 22);
  const auto val = separable(2, 16, 23);
  ClassifierTrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.seed = 9;
  const auto a = train_classifier(train, val, ClassifierKind::combined, small_spec(16), cfg);
  const auto b = train_classifier(train, val, ClassifierKind::combined, small_spec(16), cfg);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
    EXPECT_EQ(a.log[i].val_loss, b.log[i].val_loss);
  }
  const auto pa = a.model->params(), pb = b.model->params();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
}

TEST(Training, RejectsBadInputs) {
  auto train = separable(2, 16, 24);
  const auto val = separable(1, 16, 25);
  ClassifierTrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(train_classifier({}, val, ClassifierKind::time, small_spec(16), cfg), Error);
  EXPECT_THROW(train_classifier(train, {}, ClassifierKind::time, small_spec(16), cfg), Error);
  auto bad_label = train;
  bad_label[0].label = 3;
  EXPECT_THROW(train_classifier(bad_label, val, ClassifierKind::time, small_spec(16), cfg), Error);
  auto no_freq = train;
  no_freq[1].frequency.reset();
  EXPECT_THROW(train_classifier(no_freq, val, ClassifierKind::combined, small_spec(16), cfg), Error);
  EXPECT_THROW(train_classifier(train, val, ClassifierKind::time, small_spec(32), cfg), Error);
}

TEST(Config, JsonAndKindNames) {
  ClassifierTrainConfig c;
  c.epochs = 7;
  c.seed = 42;
  EXPECT_EQ(classifier_config_from_json(classifier_config_to_json(c)), c);
  EXPECT_THROW(classifier_config_from_json(R"({"epoch": 3})"), Error);
  for (auto k : {ClassifierKind::time, ClassifierKind::frequency, ClassifierKind::combined}) {
    EXPECT_EQ(classifier_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(classifier_kind_from_string("spectral"), Error);
}

TEST(Persistence, CheckpointAndPredictions) {
  const auto train = separable(3, 16, 26);
  const auto val = separable(1, 16, 27);
  ClassifierTrainConfig cfg;
  cfg.epochs = 2;
  cfg.aux_branch_weight = 0.3;
  auto r = train_classifier(train, val, ClassifierKind::combined, small_spec(16), cfg);
  const auto dir = std::filesystem::temp_directory_path() / "gprlab_test_clf";
  std::filesystem::remove_all(dir);
  save_classifier(*r.model, dir);
  auto loaded = load_classifier(dir);
  EXPECT_EQ(loaded->kind(), ClassifierKind::combined);
  EXPECT_TRUE(loaded->aux_heads());
  const auto pa = r.model->predict_proba(val), pb = loaded->predict_proba(val);
  EXPECT_EQ(pa.data, pb.data);

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < val.size(); ++i) ids.push_back("s" + std::to_string(i));
  write_predictions_csv(dir / "predictions.csv", ids, pa);
  std::ifstream in(dir / "predictions.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sample_id,p_concrete,p_metallic,p_pvc,argmax");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, static_cast<int>(val.size()));
  write_classifier_log(dir / "log.csv", r.log);
  EXPECT_TRUE(std::filesystem::exists(dir / "log.csv"));
  std::filesystem::remove_all(dir);
}
