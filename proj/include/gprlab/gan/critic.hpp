#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "gprlab/nn/layers.hpp"

namespace gprlab::gan {

using nn::Param;
using nn::ShapeRecord;
using nn::Tensor;

/// Stride-2 5x5 convolutions with 16, 32, 64, ... filters, each followed by
/// a leaky rectifier, then a scalar dense head. The full 256x256 critic has
/// five convolutions; smaller canvases keep the first log2(size/8).
struct CriticSpec {
  int image_size = 256;
  int kernel = 5;
  double leaky_slope = 0.3;
  bool aux_head = false;
  int num_classes = 3;
  /// Overrides the convolution count when >= 0; zero gives a linear critic.
  int num_convs = -1;

  int conv_count() const;
  std::vector<int> filters() const;
  int flatten_size() const;
  void validate() const;

  bool operator==(const CriticSpec&) const = default;
};

template <typename T>
struct CriticOutput {
  Tensor<T> scores;                     // (n, 1)
  std::optional<Tensor<T>> aux_logits;  // (n, num_classes)
};

template <typename T>
class Critic {
 public:
  explicit Critic(const CriticSpec& spec);
  Critic(const Critic&) = delete;
  Critic& operator=(const Critic&) = delete;

  void init(std::mt19937_64& rng);

  CriticOutput<T> forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace = nullptr);
  /// Gradient with respect to the last forward input. Parameter gradients
  /// are accumulated only when `param_grads` is set.
  Tensor<T> backward(const Tensor<T>& dscores, const Tensor<T>* daux, bool param_grads);

  /// Directional derivative of the scores at the last forward point along
  /// `dx`, followed by its weight gradient for seed `dseed` (n, 1). Used for
  /// the weight gradient of the gradient penalty.
  Tensor<T> tangent(const Tensor<T>& dx);
  void tangent_backward(const Tensor<T>& dseed);

  std::vector<Param<T>*> params();
  const CriticSpec& spec() const { return spec_; }

  /// Scalar head weights, exposed for analytic tests.
  nn::Dense<T>& head() { return head_; }

 private:
  CriticSpec spec_;
  std::vector<std::unique_ptr<nn::Conv2d<T>>> convs_;
  std::vector<nn::LeakyReLU<T>> acts_;
  nn::Dense<T> head_;
  std::optional<nn::Dense<T>> aux_;
  int feat_c_ = 0, feat_h_ = 0, feat_w_ = 0;
};

}  // namespace gprlab::gan
