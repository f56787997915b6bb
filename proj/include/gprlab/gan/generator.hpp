#pragma once

#include <array>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "gprlab/nn/layers.hpp"

namespace gprlab::gan {

using nn::Param;
using nn::ShapeRecord;
using nn::Tensor;

/// (ConvTranspose filters, Conv filters) per upsampling block of the full
/// 256x256 generator. Smaller canvases keep the last log2(size/8) blocks.
inline constexpr std::array<std::pair<int, int>, 5> kGeneratorLadder = {
    {{128, 256}, {256, 128}, {128, 64}, {64, 32}, {32, 16}}};

/// Supported square canvas sizes: 16 .. 256.
bool valid_image_size(int size);
/// log2(size / 8)
int num_resolution_steps(int size);

struct GeneratorSpec {
  int latent_dim = 100;
  int num_classes = 3;
  int image_size = 256;
  int kernel = 5;
  double bn_momentum = 0.8;
  double bn_eps = 1e-3;

  std::vector<std::pair<int, int>> blocks() const;
  /// Channels of the 8x8 tensor the dense layer reshapes into.
  int base_channels() const;
  void validate() const;

  bool operator==(const GeneratorSpec&) const = default;
};

template <typename T>
class Generator {
 public:
  explicit Generator(const GeneratorSpec& spec);
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  void init(std::mt19937_64& rng);

  /// z: (n, latent_dim); labels: n class ids. Returns (n, 1, size, size).
  /// `training` selects batch statistics (and updates running statistics).
  /// When `trace` is set, one record per architecture-table row is appended.
  Tensor<T> forward(const Tensor<T>& z, const std::vector<int>& labels, bool training,
                    std::vector<ShapeRecord>* trace = nullptr);
  /// Accumulates parameter gradients for d loss / d output.
  void backward(const Tensor<T>& dout);

  std::vector<Param<T>*> params();
  std::vector<Param<T>*> buffers();
  const GeneratorSpec& spec() const { return spec_; }

 private:
  struct Block {
    nn::ConvTranspose2d<T> up;
    nn::Conv2d<T> conv;
    nn::ReLU<T> relu;
    nn::BatchNorm<T> bn;
  };

  GeneratorSpec spec_;
  nn::Embedding<T> embedding_;
  nn::Dense<T> dense_;
  nn::BatchNorm<T> bn0_;
  std::vector<std::unique_ptr<Block>> blocks_;
  nn::Conv2d<T> out_conv_;
  nn::Tanh<T> tanh_;
  Tensor<T> z_, emb_;
};

}  // namespace gprlab::gan
