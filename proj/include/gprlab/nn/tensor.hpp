#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace gprlab::nn {

/// Heap storage aligned to Eigen's widest packet. Vectorized kernels peel
/// unaligned heads at run time, so unaligned buffers would make the bits of
/// a result depend on where the allocator placed them.
template <typename T>
using Buffer = std::vector<T, Eigen::aligned_allocator<T>>;

/// Dense NCHW batch. Flat activations use h = w = 1.
template <typename T>
struct Tensor {
  int n = 0, c = 0, h = 1, w = 1;
  Buffer<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_ = 1, int w_ = 1, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }
  std::size_t size() const { return data.size(); }
  T* sample(int i) { return data.data() + i * sample_size(); }
  const T* sample(int i) const { return data.data() + i * sample_size(); }
  T& at(int i, int ch, int y, int x) {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  T at(int i, int ch, int y, int x) const {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  void zero() { std::fill(data.begin(), data.end(), T(0)); }
};

/// Named trainable parameter or persistent buffer. `grad` is empty for
/// buffers.
template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  Buffer<T> value;
  Buffer<T> grad;
  bool trainable = true;

  Param() = default;
  Param(std::string name_, std::vector<int> shape_, bool trainable_ = true);
  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

/// One row of an architecture table: operation name and output shape with
/// the batch dimension first.
struct ShapeRecord {
  std::string op;
  std::vector<int> shape;

  bool operator==(const ShapeRecord&) const = default;
};

/// "(n, 16, 16, 128)" style rendering; the batch entry prints as "n".
std::string format_shape(const std::vector<int>& shape);

/// NHWC shape of an activation tensor, collapsing h = w = 1 to (n, c).
template <typename T>
std::vector<int> nhwc_shape(const Tensor<T>& t) {
  if (t.h == 1 && t.w == 1) return {t.n, t.c};
  return {t.n, t.h, t.w, t.c};
}

}  // namespace gprlab::nn
