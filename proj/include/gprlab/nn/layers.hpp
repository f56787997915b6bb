#pragma once

#include <random>
#include <string>
#include <vector>

#include "gprlab/nn/conv.hpp"
#include "gprlab/nn/tensor.hpp"

namespace gprlab::nn {

// Every layer caches what its backward pass needs from the most recent
// forward call. `tangent` propagates an input perturbation through the layer
// linearized at that forward point (biases dropped, activation slopes
// frozen); `tangent_backward` then differentiates the tangent output with
// respect to the weights. Together they give the weight gradient of a
// directional derivative, which is what the gradient penalty needs.

template <typename T>
class Dense {
 public:
  Dense(const std::string& name, int in, int out);
  void init(std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy, bool param_grads = true);
  Tensor<T> tangent(const Tensor<T>& dx);
  Tensor<T> tangent_backward(const Tensor<T>& dt);

  int in_features() const { return in_; }
  int out_features() const { return out_; }
  std::vector<Param<T>*> params() { return {&weight, &bias}; }

  Param<T> weight;  // out x in
  Param<T> bias;

 private:
  int in_, out_;
  Tensor<T> x_, t_;
};

template <typename T>
class Conv2d {
 public:
  Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int stride);
  void init(std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy, bool param_grads = true);
  Tensor<T> tangent(const Tensor<T>& dx);
  Tensor<T> tangent_backward(const Tensor<T>& dt);

  std::vector<Param<T>*> params() { return {&weight, &bias}; }
  int out_channels() const { return cout_; }

  Param<T> weight;  // cout x (cin * k * k)
  Param<T> bias;
  bool need_input_grad = true;

 private:
  ConvGeometry geometry(const Tensor<T>& x) const;
  Tensor<T> apply(const Tensor<T>& x, bool with_bias) const;
  Tensor<T> adjoint(const Tensor<T>& dy, const Tensor<T>& x, bool param_grads, bool input_grad);

  int cin_, cout_, kernel_, stride_;
  Tensor<T> x_, t_;
};

/// Stride-s transposed convolution: the adjoint of a 'same' convolution
/// from (cout, s*H, s*W) down to (cin, H, W).
template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d(const std::string& name, int in_channels, int out_channels, int kernel,
                  int stride);
  void init(std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy, bool param_grads = true);

  std::vector<Param<T>*> params() { return {&weight, &bias}; }

  Param<T> weight;  // cin x (cout * k * k)
  Param<T> bias;

 private:
  ConvGeometry geometry(const Tensor<T>& x) const;

  int cin_, cout_, kernel_, stride_;
  Tensor<T> x_;
};

/// Per-channel batch normalization. Running statistics follow
/// running = momentum * running + (1 - momentum) * batch.
template <typename T>
class BatchNorm {
 public:
  BatchNorm(const std::string& name, int channels, double momentum = 0.8, double eps = 1e-3);

  Tensor<T> forward(const Tensor<T>& x, bool training);
  Tensor<T> backward(const Tensor<T>& dy, bool param_grads = true);

  std::vector<Param<T>*> params() { return {&gamma, &beta}; }
  std::vector<Param<T>*> buffers() { return {&running_mean, &running_var}; }

  Param<T> gamma, beta, running_mean, running_var;

 private:
  int channels_;
  double momentum_, eps_;
  bool training_ = false;
  Tensor<T> xhat_;
  Buffer<T> inv_std_;
};

template <typename T>
class Embedding {
 public:
  Embedding(const std::string& name, int num_classes, int dim);
  void init(std::mt19937_64& rng);

  Tensor<T> forward(const std::vector<int>& labels);
  void backward(const Tensor<T>& dy);

  std::vector<Param<T>*> params() { return {&table}; }
  int num_classes() const { return classes_; }

  Param<T> table;  // classes x dim

 private:
  int classes_, dim_;
  std::vector<int> labels_;
};

template <typename T>
class LeakyReLU {
 public:
  explicit LeakyReLU(T alpha = T(0.3)) : alpha_(alpha) {}
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy) const;
  /// Same slopes as the last forward call.
  Tensor<T> tangent(const Tensor<T>& dx) const { return backward(dx); }

 private:
  T alpha_;
  std::vector<unsigned char> negative_;
};

template <typename T>
class ReLU {
 public:
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  std::vector<unsigned char> active_;
};

template <typename T>
class Tanh {
 public:
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  Tensor<T> y_;
};

/// Row-wise softmax of an (n, k) tensor.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

/// Mean categorical cross entropy of softmax(logits) against integer labels,
/// with probabilities clamped at 1e-12 before the log. Writes the gradient
/// with respect to the logits (already divided by n) when `dlogits` is set.
template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels,
                        Tensor<T>* dlogits);

inline constexpr double kLogClamp = 1e-12;

}  // namespace gprlab::nn
