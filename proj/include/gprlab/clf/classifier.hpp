#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gprlab/nn/layers.hpp"

namespace gprlab::clf {

using nn::Param;
using nn::ShapeRecord;
using nn::Tensor;

struct ClassifierSpec {
  int image_size = 256;
  double leaky_slope = 0.3;
  int num_classes = 3;

  /// Side of the trunk output: two stride-2 1x1 convolutions.
  int trunk_size() const { return ((image_size + 1) / 2 + 1) / 2; }
  int trunk_channels() const { return 4; }
  int flatten_size() const { return trunk_size() * trunk_size() * trunk_channels(); }
  void validate() const;

  bool operator==(const ClassifierSpec&) const = default;
};

/// conv(2, 1x1, stride 2) -> leaky -> conv(4, 1x1, stride 2) -> leaky.
template <typename T>
class Trunk {
 public:
  Trunk(const std::string& prefix, const ClassifierSpec& spec);
  void init(std::mt19937_64& rng);
  Tensor<T> forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace = nullptr);
  void backward(const Tensor<T>& dy);
  std::vector<Param<T>*> params();

  nn::Conv2d<T> conv0, conv1;

 private:
  nn::LeakyReLU<T> act0_, act1_;
};

template <typename T>
class SingleClassifier {
 public:
  explicit SingleClassifier(const ClassifierSpec& spec);
  void init(std::mt19937_64& rng);

  /// Logits (n, num_classes); probabilities are softmax(logits).
  Tensor<T> forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace = nullptr);
  void backward(const Tensor<T>& dlogits);
  std::vector<Param<T>*> params();
  const ClassifierSpec& spec() const { return spec_; }

  Trunk<T> trunk;
  nn::Dense<T> head;

 private:
  ClassifierSpec spec_;
};

template <typename T>
struct CombinedOutput {
  Tensor<T> logits;
  std::optional<Tensor<T>> aux_time;  // per-branch heads, when enabled
  std::optional<Tensor<T>> aux_freq;
};

/// Time and frequency trunks merged by elementwise product, then one dense
/// head. Optional per-branch heads read each trunk's own features.
template <typename T>
class CombinedClassifier {
 public:
  CombinedClassifier(const ClassifierSpec& spec, bool aux_heads);
  void init(std::mt19937_64& rng);

  CombinedOutput<T> forward(const Tensor<T>& x_time, const Tensor<T>& x_freq,
                            std::vector<ShapeRecord>* trace = nullptr);
  void backward(const Tensor<T>& dlogits, const Tensor<T>* daux_time, const Tensor<T>* daux_freq);
  std::vector<Param<T>*> params();
  const ClassifierSpec& spec() const { return spec_; }
  bool has_aux_heads() const { return aux_time_head.has_value(); }

  Trunk<T> time_trunk, freq_trunk;
  nn::Dense<T> head;
  std::optional<nn::Dense<T>> aux_time_head, aux_freq_head;

 private:
  ClassifierSpec spec_;
  Tensor<T> ft_, ff_;  // flattened trunk outputs
};

/// Mean categorical cross entropy between probability rows and one-hot
/// targets, probabilities clamped at 1e-12 before the log.
template <typename T>
T cross_entropy(const Tensor<T>& probs, const Tensor<T>& one_hot);

}  // namespace gprlab::clf
