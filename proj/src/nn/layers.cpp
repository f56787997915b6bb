#include "gprlab/nn/layers.hpp"

#include <Eigen/Core>

#include <cmath>

#include "gprlab/core/error.hpp"

namespace gprlab::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<RowMat<T>>;
template <typename T>
using CMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;

template <typename T>
void glorot(Param<T>& p, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (auto& v : p.value) v = static_cast<T>(u(rng));
}

void shape_error(const std::string& layer, const std::string& detail) {
  fail(ErrorCode::shape_mismatch, layer + ": " + detail);
}

}  // namespace

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(const std::string& name, int in, int out)
    : weight(name + ".weight", {out, in}), bias(name + ".bias", {out}), in_(in), out_(out) {}

template <typename T>
void Dense<T>::init(std::mt19937_64& rng) {
  glorot(weight, in_, out_, rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  if (static_cast<int>(x.sample_size()) != in_) {
    shape_error(weight.name, "expected " + std::to_string(in_) + " features, got " +
                                 std::to_string(x.sample_size()));
  }
  x_ = x;
  Tensor<T> y(x.n, out_);
  CMap<T> X(x.data.data(), x.n, in_);
  CMap<T> W(weight.value.data(), out_, in_);
  Map<T> Y(y.data.data(), x.n, out_);
  Y.noalias() = X * W.transpose();
  Y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.value.data(), out_);
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dy, bool param_grads) {
  CMap<T> D(dy.data.data(), dy.n, out_);
  CMap<T> X(x_.data.data(), x_.n, in_);
  CMap<T> W(weight.value.data(), out_, in_);
  if (param_grads) {
    Map<T>(weight.grad.data(), out_, in_).noalias() += D.transpose() * X;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.grad.data(), out_) += D.colwise().sum();
  }
  Tensor<T> dx(x_.n, x_.c, x_.h, x_.w);
  Map<T>(dx.data.data(), x_.n, in_).noalias() = D * W;
  return dx;
}

template <typename T>
Tensor<T> Dense<T>::tangent(const Tensor<T>& dx) {
  t_ = dx;
  Tensor<T> y(dx.n, out_);
  Map<T>(y.data.data(), dx.n, out_).noalias() =
      CMap<T>(dx.data.data(), dx.n, in_) * CMap<T>(weight.value.data(), out_, in_).transpose();
  return y;
}

template <typename T>
Tensor<T> Dense<T>::tangent_backward(const Tensor<T>& dt) {
  CMap<T> D(dt.data.data(), dt.n, out_);
  Map<T>(weight.grad.data(), out_, in_).noalias() +=
      D.transpose() * CMap<T>(t_.data.data(), t_.n, in_);
  Tensor<T> dx(t_.n, t_.c, t_.h, t_.w);
  Map<T>(dx.data.data(), t_.n, in_).noalias() = D * CMap<T>(weight.value.data(), out_, in_);
  return dx;
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const std::string& name, int in_channels, int out_channels, int kernel,
                  int stride)
    : weight(name + ".weight", {out_channels, in_channels, kernel, kernel}),
      bias(name + ".bias", {out_channels}),
      cin_(in_channels),
      cout_(out_channels),
      kernel_(kernel),
      stride_(stride) {}

template <typename T>
void Conv2d<T>::init(std::mt19937_64& rng) {
  glorot(weight, cin_ * kernel_ * kernel_, cout_ * kernel_ * kernel_, rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <typename T>
ConvGeometry Conv2d<T>::geometry(const Tensor<T>& x) const {
  if (x.c != cin_) {
    shape_error(weight.name, "expected " + std::to_string(cin_) + " input channels, got " +
                                 std::to_string(x.c));
  }
  return same_geometry(cin_, x.h, x.w, kernel_, stride_);
}

template <typename T>
Tensor<T> Conv2d<T>::apply(const Tensor<T>& x, bool with_bias) const {
  const ConvGeometry g = geometry(x);
  Tensor<T> y(x.n, cout_, g.out_h, g.out_w);
  Buffer<T> cols(static_cast<std::size_t>(g.col_rows()) * g.col_cols());
  CMap<T> W(weight.value.data(), cout_, g.col_rows());
  for (int i = 0; i < x.n; ++i) {
    im2col(x.sample(i), g, cols.data());
    Map<T> Y(y.sample(i), cout_, g.col_cols());
    Y.noalias() = W * CMap<T>(cols.data(), g.col_rows(), g.col_cols());
    if (with_bias) Y.colwise() += VecMap<T>(const_cast<T*>(bias.value.data()), cout_);
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::adjoint(const Tensor<T>& dy, const Tensor<T>& x, bool param_grads,
                             bool input_grad) {
  const ConvGeometry g = geometry(x);
  if (dy.c != cout_ || dy.h != g.out_h || dy.w != g.out_w || dy.n != x.n) {
    shape_error(weight.name, "gradient shape does not match the last forward output");
  }
  Buffer<T> cols(static_cast<std::size_t>(g.col_rows()) * g.col_cols());
  CMap<T> W(weight.value.data(), cout_, g.col_rows());
  Map<T> dW(weight.grad.data(), cout_, g.col_rows());
  Tensor<T> dx;
  if (input_grad) dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int i = 0; i < x.n; ++i) {
    CMap<T> D(dy.sample(i), cout_, g.col_cols());
    if (param_grads) {
      im2col(x.sample(i), g, cols.data());
      dW.noalias() += D * CMap<T>(cols.data(), g.col_rows(), g.col_cols()).transpose();
      VecMap<T>(bias.grad.data(), cout_) += D.rowwise().sum();
    }
    if (input_grad) {
      Map<T>(cols.data(), g.col_rows(), g.col_cols()).noalias() = W.transpose() * D;
      col2im(cols.data(), g, dx.sample(i));
    }
  }
  return dx;
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  x_ = x;
  return apply(x, true);
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, bool param_grads) {
  return adjoint(dy, x_, param_grads, need_input_grad);
}

template <typename T>
Tensor<T> Conv2d<T>::tangent(const Tensor<T>& dx) {
  t_ = dx;
  return apply(dx, false);
}

template <typename T>
Tensor<T> Conv2d<T>::tangent_backward(const Tensor<T>& dt) {
  // Bias does not enter the tangent, so its gradient must stay untouched.
  Buffer<T> saved = bias.grad;
  Tensor<T> dx = adjoint(dt, t_, true, need_input_grad);
  bias.grad = std::move(saved);
  return dx;
}

// ---------------------------------------------------------------- ConvTranspose2d

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(const std::string& name, int in_channels, int out_channels,
                                    int kernel, int stride)
    : weight(name + ".weight", {in_channels, out_channels, kernel, kernel}),
      bias(name + ".bias", {out_channels}),
      cin_(in_channels),
      cout_(out_channels),
      kernel_(kernel),
      stride_(stride) {}

template <typename T>
void ConvTranspose2d<T>::init(std::mt19937_64& rng) {
  glorot(weight, cout_ * kernel_ * kernel_, cin_ * kernel_ * kernel_, rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <typename T>
ConvGeometry ConvTranspose2d<T>::geometry(const Tensor<T>& x) const {
  if (x.c != cin_) {
    shape_error(weight.name, "expected " + std::to_string(cin_) + " input channels, got " +
                                 std::to_string(x.c));
  }
  ConvGeometry g = same_geometry(cout_, x.h * stride_, x.w * stride_, kernel_, stride_);
  return g;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x) {
  x_ = x;
  const ConvGeometry g = geometry(x);
  Tensor<T> y(x.n, cout_, g.height, g.width);
  Buffer<T> cols(static_cast<std::size_t>(g.col_rows()) * g.col_cols());
  CMap<T> W(weight.value.data(), cin_, g.col_rows());
  const int plane = g.height * g.width;
  for (int i = 0; i < x.n; ++i) {
    Map<T>(cols.data(), g.col_rows(), g.col_cols()).noalias() =
        W.transpose() * CMap<T>(x.sample(i), cin_, g.col_cols());
    col2im(cols.data(), g, y.sample(i));
    T* out = y.sample(i);
    for (int c = 0; c < cout_; ++c)
      for (int p = 0; p < plane; ++p) out[c * plane + p] += bias.value[c];
  }
  return y;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& dy, bool param_grads) {
  const ConvGeometry g = geometry(x_);
  if (dy.c != cout_ || dy.h != g.height || dy.w != g.width || dy.n != x_.n) {
    shape_error(weight.name, "gradient shape does not match the last forward output");
  }
  Buffer<T> cols(static_cast<std::size_t>(g.col_rows()) * g.col_cols());
  CMap<T> W(weight.value.data(), cin_, g.col_rows());
  Map<T> dW(weight.grad.data(), cin_, g.col_rows());
  Tensor<T> dx(x_.n, x_.c, x_.h, x_.w);
  const int plane = g.height * g.width;
  for (int i = 0; i < x_.n; ++i) {
    im2col(dy.sample(i), g, cols.data());
    CMap<T> C(cols.data(), g.col_rows(), g.col_cols());
    if (param_grads) {
      dW.noalias() += CMap<T>(x_.sample(i), cin_, g.col_cols()) * C.transpose();
      const T* d = dy.sample(i);
      for (int c = 0; c < cout_; ++c) {
        T s = 0;
        for (int p = 0; p < plane; ++p) s += d[c * plane + p];
        bias.grad[c] += s;
      }
    }
    Map<T>(dx.sample(i), cin_, g.col_cols()).noalias() = W * C;
  }
  return dx;
}

// ---------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(const std::string& name, int channels, double momentum, double eps)
    : gamma(name + ".gamma", {channels}),
      beta(name + ".beta", {channels}),
      running_mean(name + ".running_mean", {channels}, false),
      running_var(name + ".running_var", {channels}, false),
      channels_(channels),
      momentum_(momentum),
      eps_(eps) {
  std::fill(gamma.value.begin(), gamma.value.end(), T(1));
  std::fill(running_var.value.begin(), running_var.value.end(), T(1));
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, bool training) {
  if (x.c != channels_) shape_error(gamma.name, "channel count mismatch");
  training_ = training;
  const int plane = x.h * x.w;
  const double count = static_cast<double>(x.n) * plane;
  Tensor<T> y(x.n, x.c, x.h, x.w);
  xhat_ = Tensor<T>(x.n, x.c, x.h, x.w);
  inv_std_.assign(channels_, T(0));
  for (int c = 0; c < channels_; ++c) {
    double mean, var;
    if (training) {
      double s = 0;
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.sample(i) + c * plane;
        for (int k = 0; k < plane; ++k) s += p[k];
      }
      mean = s / count;
      double v = 0;
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.sample(i) + c * plane;
        for (int k = 0; k < plane; ++k) v += (p[k] - mean) * (p[k] - mean);
      }
      var = v / count;
      running_mean.value[c] =
          static_cast<T>(momentum_ * running_mean.value[c] + (1 - momentum_) * mean);
      running_var.value[c] =
          static_cast<T>(momentum_ * running_var.value[c] + (1 - momentum_) * var);
    } else {
      mean = running_mean.value[c];
      var = running_var.value[c];
    }
    const T inv = static_cast<T>(1.0 / std::sqrt(var + eps_));
    inv_std_[c] = inv;
    const T m = static_cast<T>(mean);
    for (int i = 0; i < x.n; ++i) {
      const T* p = x.sample(i) + c * plane;
      T* h = xhat_.sample(i) + c * plane;
      T* o = y.sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) {
        h[k] = (p[k] - m) * inv;
        o[k] = gamma.value[c] * h[k] + beta.value[c];
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& dy, bool param_grads) {
  const int plane = dy.h * dy.w;
  const T count = static_cast<T>(static_cast<double>(dy.n) * plane);
  Tensor<T> dx(dy.n, dy.c, dy.h, dy.w);
  for (int c = 0; c < channels_; ++c) {
    T sum_dy = 0, sum_dy_xhat = 0;
    for (int i = 0; i < dy.n; ++i) {
      const T* d = dy.sample(i) + c * plane;
      const T* h = xhat_.sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) {
        sum_dy += d[k];
        sum_dy_xhat += d[k] * h[k];
      }
    }
    if (param_grads) {
      gamma.grad[c] += sum_dy_xhat;
      beta.grad[c] += sum_dy;
    }
    const T scale = gamma.value[c] * inv_std_[c];
    for (int i = 0; i < dy.n; ++i) {
      const T* d = dy.sample(i) + c * plane;
      const T* h = xhat_.sample(i) + c * plane;
      T* o = dx.sample(i) + c * plane;
      if (training_) {
        for (int k = 0; k < plane; ++k)
          o[k] = scale * (d[k] - sum_dy / count - h[k] * sum_dy_xhat / count);
      } else {
        for (int k = 0; k < plane; ++k) o[k] = scale * d[k];
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- Embedding

template <typename T>
Embedding<T>::Embedding(const std::string& name, int num_classes, int dim)
    : table(name + ".table", {num_classes, dim}), classes_(num_classes), dim_(dim) {}

template <typename T>
void Embedding<T>::init(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (auto& v : table.value) v = static_cast<T>(u(rng));
}

template <typename T>
Tensor<T> Embedding<T>::forward(const std::vector<int>& labels) {
  Tensor<T> y(static_cast<int>(labels.size()), dim_);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes_) {
      fail(ErrorCode::invalid_argument, "label id " + std::to_string(labels[i]) +
                                            " outside [0, " + std::to_string(classes_) + ")");
    }
    std::copy_n(table.value.data() + labels[i] * dim_, dim_, y.sample(static_cast<int>(i)));
  }
  labels_ = labels;
  return y;
}

template <typename T>
void Embedding<T>::backward(const Tensor<T>& dy) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const T* d = dy.sample(static_cast<int>(i));
    T* g = table.grad.data() + labels_[i] * dim_;
    for (int k = 0; k < dim_; ++k) g[k] += d[k];
  }
}

// ---------------------------------------------------------------- activations

template <typename T>
Tensor<T> LeakyReLU<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = x;
  negative_.assign(x.size(), 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x.data[k] < T(0)) {
      negative_[k] = 1;
      y.data[k] = alpha_ * x.data[k];
    }
  }
  return y;
}

template <typename T>
Tensor<T> LeakyReLU<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx = dy;
  for (std::size_t k = 0; k < dx.size(); ++k)
    if (negative_[k]) dx.data[k] *= alpha_;
  return dx;
}

template <typename T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = x;
  active_.assign(x.size(), 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x.data[k] > T(0)) {
      active_[k] = 1;
    } else {
      y.data[k] = T(0);
    }
  }
  return y;
}

template <typename T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx = dy;
  for (std::size_t k = 0; k < dx.size(); ++k)
    if (!active_[k]) dx.data[k] = T(0);
  return dx;
}

template <typename T>
Tensor<T> Tanh<T>::forward(const Tensor<T>& x) {
  // Saturated tanh rounds to exactly +-1 in finite precision; keep the
  // open interval.
  const T top = std::nextafter(T(1), T(0));
  y_ = x;
  for (auto& v : y_.data) v = std::clamp(std::tanh(v), -top, top);
  return y_;
}

template <typename T>
Tensor<T> Tanh<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx = dy;
  for (std::size_t k = 0; k < dx.size(); ++k) dx.data[k] *= T(1) - y_.data[k] * y_.data[k];
  return dx;
}

// ---------------------------------------------------------------- softmax

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  Tensor<T> p = logits;
  const int k = static_cast<int>(logits.sample_size());
  for (int i = 0; i < logits.n; ++i) {
    T* row = p.sample(i);
    const T m = *std::max_element(row, row + k);
    T s = 0;
    for (int j = 0; j < k; ++j) s += (row[j] = std::exp(row[j] - m));
    for (int j = 0; j < k; ++j) row[j] /= s;
  }
  return p;
}

template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels,
                        Tensor<T>* dlogits) {
  if (static_cast<int>(labels.size()) != logits.n) {
    fail(ErrorCode::shape_mismatch, "cross entropy: label count does not match batch size");
  }
  const int k = static_cast<int>(logits.sample_size());
  const Tensor<T> p = softmax(logits);
  if (dlogits) *dlogits = Tensor<T>(logits.n, logits.c, logits.h, logits.w);
  double loss = 0;
  for (int i = 0; i < logits.n; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= k) fail(ErrorCode::invalid_argument, "cross entropy: label out of range");
    const double py = p.sample(i)[y];
    loss -= std::log(std::max(py, kLogClamp));
    if (dlogits && py >= kLogClamp) {
      T* d = dlogits->sample(i);
      for (int j = 0; j < k; ++j) d[j] = (p.sample(i)[j] - (j == y ? T(1) : T(0))) / logits.n;
    }
  }
  return static_cast<T>(loss / logits.n);
}

#define GPRLAB_INSTANTIATE(T)                                                        \
  template class Dense<T>;                                                           \
  template class Conv2d<T>;                                                          \
  template class ConvTranspose2d<T>;                                                 \
  template class BatchNorm<T>;                                                       \
  template class Embedding<T>;                                                       \
  template class LeakyReLU<T>;                                                       \
  template class ReLU<T>;                                                            \
  template class Tanh<T>;                                                            \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                   \
  template T softmax_cross_entropy<T>(const Tensor<T>&, const std::vector<int>&, Tensor<T>*);

GPRLAB_INSTANTIATE(float)
GPRLAB_INSTANTIATE(double)

#undef GPRLAB_INSTANTIATE

}  // namespace gprlab::nn
