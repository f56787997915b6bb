#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "gprlab/core/error.hpp"
#include "gprlab/eval/experiment.hpp"
#include "gprlab/eval/metrics.hpp"

using namespace gprlab;
using namespace gprlab::eval;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

/// Tiny images whose class is encoded as a constant level plus noise.
std::vector<LabeledImage> toy_images(int per_class, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd(0.0f, 0.05f);
  std::vector<LabeledImage> out;
  for (int c = 0; c < kNumClasses; ++c) {
    for (int k = 0; k < per_class; ++k) {
      LabeledImage li;
      li.image.pixels = ImageRM(size, size);
      for (int i = 0; i < size * size; ++i) {
        li.image.pixels.data()[i] = std::clamp(-0.6f + 0.6f * c + nd(rng), -1.0f, 1.0f);
      }
      li.label = class_from_id(c);
      out.push_back(li);
    }
  }
  return out;
}

}  // namespace

TEST(Confusion, Examples) {
  std::vector<int> t, p;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < 15; ++k) t.push_back(c);
  const auto perfect = confusion_matrix(t, t);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(perfect.counts[c][c], 15);
  EXPECT_EQ(perfect.trace(), 45);

  p.assign(t.size(), 0);
  const auto zero = confusion_matrix(p, t);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(zero.counts[c][0], 15);

  const std::vector<int> truths{0, 0, 1, 2}, preds{0, 1, 1, 2};
  const auto hand = confusion_matrix(preds, truths);
  EXPECT_EQ(hand.counts[0][0], 1);
  EXPECT_EQ(hand.counts[0][1], 1);
  EXPECT_EQ(hand.counts[1][1], 1);
  EXPECT_EQ(hand.counts[2][2], 1);
  EXPECT_EQ(hand.total(), 4);

  EXPECT_EQ(code_of([&] { confusion_matrix(preds, std::vector<int>{0}); }), ErrorCode::shape_mismatch);
  EXPECT_EQ(code_of([&] { confusion_matrix(std::vector<int>{3}, std::vector<int>{0}); }),
            ErrorCode::invalid_argument);
}

TEST(F1, HarmonicMeanExamples) {
  EXPECT_NEAR(f1_score(0.54, 1.00), 0.70, 0.005);
  EXPECT_NEAR(f1_score(1.00, 0.82), 0.90, 0.005);
  EXPECT_NEAR(f1_score(0.95, 0.90), 0.92, 0.005);
  EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(Report, StandardDefinitionsOnHandMatrix) {
  ConfusionMatrix cm;
  cm.counts = {{5, 2, 1}, {0, 7, 3}, {1, 0, 6}};
  const auto r = report(cm);
  // class 0: TP 5, FP 1, FN 3, TN 16
  EXPECT_DOUBLE_EQ(r.classes[0].precision, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.classes[0].recall, 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(r.classes[0].accuracy, 21.0 / 25.0);
  EXPECT_EQ(r.classes[0].support, 8);
  EXPECT_DOUBLE_EQ(r.all.accuracy, 18.0 / 25.0);
  EXPECT_EQ(r.all.support, 25);
  double mp = 0, mr = 0, mf = 0;
  for (const auto& m : r.classes) {
    EXPECT_EQ(m.f1, f1_score(m.precision, m.recall));
    mp += m.precision / 3;
    mr += m.recall / 3;
    mf += m.f1 / 3;
  }
  EXPECT_NEAR(r.all.precision, mp, 1e-15);
  EXPECT_NEAR(r.all.recall, mr, 1e-15);
  EXPECT_NEAR(r.all.f1, mf, 1e-15);
  EXPECT_EQ(r.classes[2].name, "PVC");
}

TEST(Report, DegenerateClassFlagged) {
  const std::vector<int> truths{0, 0, 1, 1}, preds{0, 1, 1, 1};
  const auto r = report(confusion_matrix(preds, truths));
  EXPECT_EQ(r.classes[2].precision, 0.0);
  EXPECT_EQ(r.classes[2].recall, 0.0);
  EXPECT_EQ(r.classes[2].f1, 0.0);
  EXPECT_TRUE(r.classes[2].degenerate);
  EXPECT_FALSE(r.classes[0].degenerate);
  EXPECT_TRUE(r.all.degenerate);
}

TEST(Report, EmptyMatrixRejected) {
  EXPECT_THROW(report(ConfusionMatrix{}), Error);
}

TEST(Report, PropertiesOnRandomMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> lab(0, 2);
  for (int t = 0; t < 200; ++t) {
    std::vector<int> truths(30), preds(30);
    for (auto& v : truths) v = lab(rng);
    for (auto& v : preds) v = lab(rng);
    const auto cm = confusion_matrix(preds, truths);
    const auto r = report(cm);
    EXPECT_EQ(r.all.accuracy, static_cast<double>(cm.trace()) / cm.total());
    std::int64_t support = 0;
    for (const auto& m : r.classes) {
      support += m.support;
      for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      EXPECT_EQ(m.f1, f1_score(m.precision, m.recall));
    }
    EXPECT_EQ(support, 30);
    std::vector<int> order(30);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> t2, p2;
    for (int i : order) {
      t2.push_back(truths[i]);
      p2.push_back(preds[i]);
    }
    EXPECT_EQ(report_to_json(report(confusion_matrix(p2, t2))), report_to_json(r));
  }
}

TEST(Report, TextLayout) {
  const std::vector<int> t{0, 1, 2}, p{0, 1, 2};
  const std::string text = report_to_text(report(confusion_matrix(p, t)));
  EXPECT_NE(text.find("Class"), std::string::npos);
  EXPECT_NE(text.find("Precision"), std::string::npos);
  EXPECT_NE(text.find("Concrete"), std::string::npos);
  EXPECT_NE(text.find("All"), std::string::npos);
}

TEST(Split, StratifiedAndDisjoint) {
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < 20; ++k) labels.push_back(c);
  const auto s = stratified_split(labels, 0.25, 3);
  EXPECT_EQ(s.picked.size(), 15u);
  EXPECT_EQ(s.rest.size(), 45u);
  std::vector<int> per(3, 0);
  for (auto i : s.picked) ++per[labels[i]];
  EXPECT_EQ(per, (std::vector<int>{5, 5, 5}));
  std::vector<std::size_t> all(s.picked);
  all.insert(all.end(), s.rest.begin(), s.rest.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  const auto again = stratified_split(labels, 0.25, 3);
  EXPECT_EQ(again.picked, s.picked);
}

TEST(Experiment, ZeroAugmentationGivesEqualReports) {
  ExperimentPlan plan;
  plan.real_train = toy_images(8, 16, 1);
  plan.test = toy_images(4, 16, 2);
  plan.kinds = {clf::ClassifierKind::time, clf::ClassifierKind::combined};
  plan.seeds = {0, 1};
  plan.train_config.epochs = 5;
  const auto r = run_augmentation_experiment(plan);
  ASSERT_EQ(r.runs.size(), 4u);
  for (const auto& run : r.runs) {
    EXPECT_EQ(report_to_json(run.before), report_to_json(run.after));
  }
  EXPECT_EQ(r.test_hashes.size(), plan.test.size());
  EXPECT_EQ(r.chart.size(), 2u * 3u * 4u);
}

TEST(Experiment, ScenariosShareTheTestSet) {
  ExperimentPlan plan;
  plan.real_train = toy_images(6, 16, 3);
  plan.augmentation = toy_images(3, 16, 4);
  plan.test = toy_images(3, 16, 5);
  plan.seeds = {7};
  plan.train_config.epochs = 3;
  const auto r = run_augmentation_experiment(plan);
  ASSERT_EQ(r.runs.size(), 3u);
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.before.all.support, 9);
    EXPECT_EQ(run.after.all.support, 9);
  }
  EXPECT_EQ(r.chart.size(), 36u);
}

TEST(Experiment, LeakageAborts) {
  ExperimentPlan plan;
  plan.real_train = toy_images(4, 16, 6);
  plan.test = toy_images(2, 16, 7);
  plan.test.push_back(plan.real_train[1]);
  EXPECT_EQ(code_of([&] { run_augmentation_experiment(plan); }), ErrorCode::leakage);
  plan.test.pop_back();
  plan.augmentation = {plan.test[0]};
  EXPECT_EQ(code_of([&] { run_augmentation_experiment(plan); }), ErrorCode::leakage);
}
