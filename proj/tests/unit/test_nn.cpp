#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gprlab/core/error.hpp"
#include "gprlab/nn/adam.hpp"
#include "gprlab/nn/blob_io.hpp"
#include "gprlab/nn/conv.hpp"
#include "gprlab/nn/layers.hpp"
#include "gradcheck.hpp"

using namespace gprlab;
using namespace gprlab::nn;
using gprlab::testing::check_gradients;
using gprlab::testing::check_param_gradients;
using gprlab::testing::dot;
using gprlab::testing::random_weights;

namespace {

Tensor<double> random_tensor(int n, int c, int h, int w, std::uint64_t seed) {
  Tensor<double> t(n, c, h, w);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (auto& v : t.data) v = nd(rng);
  return t;
}

void randomize(const std::vector<Param<double>*>& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (auto* p : params)
    for (auto& v : p->value) v = nd(rng);
}

void zero_grads(const std::vector<Param<double>*>& params) {
  for (auto* p : params) p->zero_grad();
}

/// Checks parameter and input gradients of a layer under loss = sum(w * y).
template <typename Fwd, typename Bwd>
void check_layer(Tensor<double> x, const std::vector<Param<double>*>& params, Fwd fwd, Bwd bwd,
                 std::uint64_t seed, double tol = 1e-5) {
  const Tensor<double> y0 = fwd(x);
  const auto w = random_weights(y0.size(), seed);
  zero_grads(params);
  fwd(x);
  Tensor<double> dy = y0;
  dy.data = w;
  const Tensor<double> dx = bwd(dy);
  auto loss = [&] { return dot(w, fwd(x).data); };
  const auto pr = check_param_gradients(params, loss, 40, seed + 1);
  EXPECT_LT(pr.max_rel_error, tol) << "parameter gradients";
  const auto xr = check_gradients({&x.data}, {&dx.data}, loss, 60, seed + 2);
  EXPECT_LT(xr.max_rel_error, tol) << "input gradient";
}

}  // namespace

TEST(ConvGeometry, SameRule) {
  const auto g = same_geometry(3, 7, 8, 5, 2);
  EXPECT_EQ(g.out_h, 4);
  EXPECT_EQ(g.out_w, 4);
  EXPECT_EQ(g.pad_top, 2);   // (4 - 1) * 2 + 5 - 7 = 4
  EXPECT_EQ(g.pad_left, 1);  // (4 - 1) * 2 + 5 - 8 = 3, odd pixel bottom/right
  const auto h = same_geometry(1, 256, 256, 5, 2);
  EXPECT_EQ(h.out_h, 128);
  EXPECT_EQ(h.pad_top, 1);
  const auto s = same_geometry(1, 9, 9, 3, 1);
  EXPECT_EQ(s.out_h, 9);
  EXPECT_EQ(s.pad_top, 1);
}

TEST(ConvGeometry, Im2colAdjoint) {
  for (int stride : {1, 2}) {
    const auto g = same_geometry(2, 7, 6, 3, stride);
    const auto x = random_tensor(1, 2, 7, 6, 5);
    gprlab::testing::Values cols(static_cast<std::size_t>(g.col_rows()) * g.col_cols());
    im2col(x.data.data(), g, cols.data());
    const auto c = random_weights(cols.size(), 6);
    gprlab::testing::Values back(x.size(), 0.0);
    col2im(c.data(), g, back.data());
    EXPECT_NEAR(dot(cols, c), dot(x.data, back), 1e-10);
  }
}

TEST(Dense, Gradients) {
  Dense<double> d("d", 6, 4);
  randomize(d.params(), 1);
  check_layer(random_tensor(3, 6, 1, 1, 2), d.params(), [&](const Tensor<double>& x) { return d.forward(x); },
              [&](const Tensor<double>& dy) { return d.backward(dy); }, 3);
}

TEST(Dense, ShapeMismatch) {
  Dense<double> d("d", 6, 4);
  EXPECT_THROW(d.forward(Tensor<double>(2, 5)), Error);
}

TEST(Dense, TangentIsLinearPart) {
  Dense<double> d("d", 5, 3);
  randomize(d.params(), 4);
  const auto x = random_tensor(2, 5, 1, 1, 5);
  const auto dx = random_tensor(2, 5, 1, 1, 6);
  d.forward(x);
  const auto t = d.tangent(dx);
  const double h = 1e-6;
  Tensor<double> xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp.data[i] += h * dx.data[i];
    xm.data[i] -= h * dx.data[i];
  }
  const auto yp = d.forward(xp), ym = d.forward(xm);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t.data[i], (yp.data[i] - ym.data[i]) / (2 * h), 1e-7);
}

TEST(Conv2d, GradientsStride1And2) {
  for (int stride : {1, 2}) {
    Conv2d<double> c("c", 2, 3, 5, stride);
    randomize(c.params(), 10 + stride);
    check_layer(random_tensor(2, 2, 7, 9, 20 + stride), c.params(),
                [&](const Tensor<double>& x) { return c.forward(x); },
                [&](const Tensor<double>& dy) { return c.backward(dy); }, 30 + stride);
  }
}

TEST(Conv2d, OutputShape) {
  Conv2d<double> c("c", 1, 16, 5, 2);
  const auto y = c.forward(Tensor<double>(2, 1, 256, 256));
  EXPECT_EQ(y.c, 16);
  EXPECT_EQ(y.h, 128);
  EXPECT_EQ(y.w, 128);
}

TEST(ConvTranspose2d, GradientsAndShape) {
  ConvTranspose2d<double> u("u", 3, 2, 5, 2);
  randomize(u.params(), 40);
  const auto x = random_tensor(2, 3, 4, 4, 41);
  const auto y = u.forward(x);
  EXPECT_EQ(y.c, 2);
  EXPECT_EQ(y.h, 8);
  EXPECT_EQ(y.w, 8);
  check_layer(x, u.params(), [&](const Tensor<double>& t) { return u.forward(t); },
              [&](const Tensor<double>& dy) { return u.backward(dy); }, 42);
}

TEST(ConvTranspose2d, AdjointOfStridedConv) {
  // With matching weights and zero biases, <conv(a), b> == <a, convT(b)>.
  Conv2d<double> c("c", 2, 3, 5, 2);
  ConvTranspose2d<double> u("u", 3, 2, 5, 2);
  randomize(c.params(), 50);
  std::fill(c.bias.value.begin(), c.bias.value.end(), 0.0);
  // conv weight is cout x (cin*k*k); transposed weight is cin' x (cout'*k*k)
  // with cin' = 3 = conv cout and cout' = 2 = conv cin.
  u.weight.value = c.weight.value;
  std::fill(u.bias.value.begin(), u.bias.value.end(), 0.0);
  const auto a = random_tensor(1, 2, 8, 8, 51);
  const auto b = random_tensor(1, 3, 4, 4, 52);
  EXPECT_NEAR(dot(c.forward(a).data, b.data), dot(a.data, u.forward(b).data), 1e-9);
}

TEST(BatchNorm, TrainingGradients) {
  BatchNorm<double> bn("bn", 3);
  randomize(bn.params(), 60);
  check_layer(random_tensor(4, 3, 3, 2, 61), bn.params(),
              [&](const Tensor<double>& x) { return bn.forward(x, true); },
              [&](const Tensor<double>& dy) { return bn.backward(dy); }, 62, 1e-5);
}

TEST(BatchNorm, RunningStatisticsMomentum) {
  BatchNorm<double> bn("bn", 1, 0.8, 1e-3);
  Tensor<double> x(4, 1);
  x.data = {1, 2, 3, 6};
  bn.forward(x, true);
  EXPECT_NEAR(bn.running_mean.value[0], 0.8 * 0.0 + 0.2 * 3.0, 1e-12);
  const auto y = bn.forward(x, false);
  const double mean = bn.running_mean.value[0];
  const double var = bn.running_var.value[0];
  EXPECT_NEAR(y.data[3], bn.gamma.value[0] * (6 - mean) / std::sqrt(var + 1e-3) + bn.beta.value[0], 1e-12);
}

TEST(Embedding, Gradient) {
  Embedding<double> e("e", 3, 4);
  randomize(e.params(), 70);
  const std::vector<int> labels{2, 0, 2};
  const auto w = random_weights(12, 71);
  zero_grads(e.params());
  e.forward(labels);
  Tensor<double> dy(3, 4);
  dy.data = w;
  e.backward(dy);
  const auto r = check_param_gradients(e.params(), [&] { return dot(w, e.forward(labels).data); }, 12, 72);
  EXPECT_LT(r.max_rel_error, 1e-7);
  EXPECT_THROW(e.forward({3}), Error);
}

TEST(Activations, Gradients) {
  LeakyReLU<double> lr(0.3);
  Tanh<double> th;
  ReLU<double> re;
  const auto x = random_tensor(2, 3, 2, 2, 80);
  check_layer(x, {}, [&](const Tensor<double>& t) { return lr.forward(t); },
              [&](const Tensor<double>& dy) { return lr.backward(dy); }, 81);
  check_layer(x, {}, [&](const Tensor<double>& t) { return th.forward(t); },
              [&](const Tensor<double>& dy) { return th.backward(dy); }, 82);
  check_layer(x, {}, [&](const Tensor<double>& t) { return re.forward(t); },
              [&](const Tensor<double>& dy) { return re.backward(dy); }, 83);
  Tensor<double> v(1, 2);
  v.data = {-2.0, 2.0};
  const auto y = lr.forward(v);
  EXPECT_DOUBLE_EQ(y.data[0], -0.6);
  EXPECT_DOUBLE_EQ(y.data[1], 2.0);
  const auto t = th.forward(v);
  EXPECT_NEAR(t.data[1], std::tanh(2.0), 1e-15);
}

TEST(Softmax, SimplexAndShiftInvariance) {
  auto x = random_tensor(5, 3, 1, 1, 90);
  const auto p = softmax(x);
  for (int i = 0; i < 5; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) {
      EXPECT_GT(p.sample(i)[j], 0.0);
      s += p.sample(i)[j];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  for (auto& v : x.data) v += 100.0;
  const auto q = softmax(x);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.data[i], q.data[i], 1e-12);
}

TEST(CrossEntropy, ExamplesAndGradient) {
  Tensor<double> zero(1, 3);
  EXPECT_NEAR(softmax_cross_entropy(zero, {1}, static_cast<Tensor<double>*>(nullptr)), std::log(3.0), 1e-12);
  Tensor<double> confident(1, 3);
  confident.data = {0.0, 0.0, 1000.0};
  EXPECT_NEAR(softmax_cross_entropy(confident, {0}, static_cast<Tensor<double>*>(nullptr)), -std::log(1e-12), 1e-6);

  auto x = random_tensor(4, 3, 1, 1, 91);
  const std::vector<int> labels{0, 2, 1, 2};
  Tensor<double> d;
  softmax_cross_entropy(x, labels, &d);
  const auto r = check_gradients({&x.data}, {&d.data},
                                 [&] { return softmax_cross_entropy(x, labels, static_cast<Tensor<double>*>(nullptr)); },
                                 12, 92);
  EXPECT_LT(r.max_rel_error, 1e-7);
  EXPECT_THROW(softmax_cross_entropy(x, {0, 1}, static_cast<Tensor<double>*>(nullptr)), Error);
  EXPECT_THROW(softmax_cross_entropy(x, {0, 1, 3, 0}, static_cast<Tensor<double>*>(nullptr)), Error);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Param<double> p("p", {3});
  p.value = {1.0, 1.0, 1.0};
  p.grad = {2.0, -0.5, 0.0};
  Adam<double> opt({&p}, {0.1, 0.9, 0.999, 1e-7});
  opt.step();
  EXPECT_NEAR(p.value[0], 1.0 - 0.1 * 2.0 / (2.0 + 1e-7), 1e-12);
  EXPECT_NEAR(p.value[1], 1.0 + 0.1 * 0.5 / (0.5 + 1e-7), 1e-12);
  EXPECT_DOUBLE_EQ(p.value[2], 1.0);
  EXPECT_EQ(opt.steps(), 1);
  const auto st = opt.state();
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[0]->name, "p.adam_m");
  EXPECT_NEAR(st[0]->value[0], 0.2, 1e-12);
  EXPECT_NEAR(st[1]->value[0], 0.004, 1e-12);
}

TEST(Adam, MinimizesQuadratic) {
  Param<double> p("p", {2});
  p.value = {3.0, -2.0};
  Adam<double> opt({&p}, {0.05, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 2000; ++i) {
    opt.zero_grad();
    for (int k = 0; k < 2; ++k) p.grad[k] = 2 * (p.value[k] - 0.5);
    opt.step();
  }
  EXPECT_NEAR(p.value[0], 0.5, 1e-2);
  EXPECT_NEAR(p.value[1], 0.5, 1e-2);
}

TEST(BlobIo, RoundTripAndMissing) {
  const auto dir = std::filesystem::temp_directory_path() / "gprlab_test_blob";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Param<float> a("layer.weight", {2, 3});
  for (std::size_t i = 0; i < a.size(); ++i) a.value[i] = 0.1f * i - 0.3f;
  save_params<float>(dir, {&a});
  Param<float> b("layer.weight", {2, 3});
  load_params<float>(dir, {&b});
  EXPECT_EQ(a.value, b.value);
  Param<float> wrong("layer.weight", {7});
  EXPECT_THROW(load_params<float>(dir, {&wrong}), Error);
  Param<float> missing("other", {1});
  EXPECT_THROW(load_params<float>(dir, {&missing}), Error);
  std::filesystem::remove_all(dir);
}

TEST(Shapes, Formatting) {
  EXPECT_EQ(format_shape({-1, 16, 16, 128}), "(n, 16, 16, 128)");
  EXPECT_EQ(format_shape({-1, 1}), "(n, 1)");
}
