#include "gprlab/gan/generator.hpp"

#include "gprlab/core/error.hpp"

namespace gprlab::gan {

bool valid_image_size(int size) {
  for (int s = 16; s <= 256; s *= 2)
    if (s == size) return true;
  return false;
}

int num_resolution_steps(int size) {
  int steps = 0;
  for (int s = 8; s < size; s *= 2) ++steps;
  return steps;
}

std::vector<std::pair<int, int>> GeneratorSpec::blocks() const {
  const int keep = num_resolution_steps(image_size);
  return {kGeneratorLadder.end() - keep, kGeneratorLadder.end()};
}

int GeneratorSpec::base_channels() const {
  const int keep = num_resolution_steps(image_size);
  // A block's input width equals its transposed-conv width.
  return kGeneratorLadder[kGeneratorLadder.size() - keep].first;
}

void GeneratorSpec::validate() const {
  require(valid_image_size(image_size), ErrorCode::invalid_argument,
          "generator: image_size must be a power of two in [16, 256]");
  require(latent_dim >= 1 && num_classes >= 1 && kernel >= 1, ErrorCode::invalid_argument,
          "generator: latent_dim, num_classes and kernel must be positive");
}

namespace {

std::string block_name(int b, const char* part) {
  return "generator.block" + std::to_string(b) + "." + part;
}

}  // namespace

template <typename T>
Generator<T>::Generator(const GeneratorSpec& spec)
    : spec_((spec.validate(), spec)),
      embedding_("generator.embedding", spec.num_classes, spec.latent_dim),
      dense_("generator.dense", spec.latent_dim, 64 * spec.base_channels()),
      bn0_("generator.bn0", spec.base_channels(), spec.bn_momentum, spec.bn_eps),
      out_conv_("generator.out_conv", spec.blocks().back().second, 1, spec.kernel, 1) {
  int in = spec.base_channels();
  int b = 0;
  for (auto [up, conv] : spec.blocks()) {
    blocks_.push_back(std::unique_ptr<Block>(new Block{
        nn::ConvTranspose2d<T>(block_name(b, "convT"), in, up, spec.kernel, 2),
        nn::Conv2d<T>(block_name(b, "conv"), up, conv, spec.kernel, 1),
        nn::ReLU<T>(),
        nn::BatchNorm<T>(block_name(b, "bn"), conv, spec.bn_momentum, spec.bn_eps)}));
    in = conv;
    ++b;
  }
}

template <typename T>
void Generator<T>::init(std::mt19937_64& rng) {
  embedding_.init(rng);
  dense_.init(rng);
  for (auto& b : blocks_) {
    b->up.init(rng);
    b->conv.init(rng);
  }
  out_conv_.init(rng);
}

template <typename T>
Tensor<T> Generator<T>::forward(const Tensor<T>& z, const std::vector<int>& labels,
                                bool training, std::vector<ShapeRecord>* trace) {
  if (static_cast<int>(z.sample_size()) != spec_.latent_dim) {
    fail(ErrorCode::shape_mismatch, "generator: latent vectors must have " +
                                        std::to_string(spec_.latent_dim) + " entries");
  }
  if (static_cast<int>(labels.size()) != z.n) {
    fail(ErrorCode::shape_mismatch, "generator: latent batch and label batch differ in size");
  }
  auto rec = [&](const char* op, std::vector<int> shape) {
    if (trace) trace->push_back({op, std::move(shape)});
  };
  const int n = z.n;
  const int d = spec_.latent_dim;
  rec("Input", {n, d});
  rec("Label", {n, 1});
  z_ = z;
  emb_ = embedding_.forward(labels);
  rec("Embedding", {n, 1, d});
  rec("Flatten", {n, d});
  Tensor<T> h(n, d);
  for (std::size_t k = 0; k < h.size(); ++k) h.data[k] = z.data[k] * emb_.data[k];
  rec("Multiply", nn::nhwc_shape(h));

  h = dense_.forward(h);
  rec("Dense", nn::nhwc_shape(h));
  const int c0 = spec_.base_channels();
  h.c = c0;
  h.h = 8;
  h.w = 8;
  rec("Reshape", nn::nhwc_shape(h));
  h = bn0_.forward(h, training);
  rec("BatchNormalization", nn::nhwc_shape(h));
  for (auto& b : blocks_) {
    h = b->up.forward(h);
    rec("ConvTranspose2D", nn::nhwc_shape(h));
    h = b->conv.forward(h);
    rec("Conv2D", nn::nhwc_shape(h));
    h = b->relu.forward(h);
    rec("ReLU", nn::nhwc_shape(h));
    h = b->bn.forward(h, training);
    rec("BatchNormalization", nn::nhwc_shape(h));
  }
  h = out_conv_.forward(h);
  rec("Conv2D", nn::nhwc_shape(h));
  h = tanh_.forward(h);
  rec("Tanh", nn::nhwc_shape(h));
  return h;
}

template <typename T>
void Generator<T>::backward(const Tensor<T>& dout) {
  Tensor<T> g = tanh_.backward(dout);
  g = out_conv_.backward(g);
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    auto& b = **it;
    g = b.bn.backward(g);
    g = b.relu.backward(g);
    g = b.conv.backward(g);
    g = b.up.backward(g);
  }
  g = bn0_.backward(g);
  g.c = static_cast<int>(g.sample_size());
  g.h = g.w = 1;
  g = dense_.backward(g);
  Tensor<T> demb(g.n, g.c);
  for (std::size_t k = 0; k < g.size(); ++k) demb.data[k] = g.data[k] * z_.data[k];
  embedding_.backward(demb);
}

template <typename T>
std::vector<Param<T>*> Generator<T>::params() {
  std::vector<Param<T>*> out;
  auto add = [&](std::vector<Param<T>*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  add(embedding_.params());
  add(dense_.params());
  add(bn0_.params());
  for (auto& b : blocks_) {
    add(b->up.params());
    add(b->conv.params());
    add(b->bn.params());
  }
  add(out_conv_.params());
  return out;
}

template <typename T>
std::vector<Param<T>*> Generator<T>::buffers() {
  std::vector<Param<T>*> out = bn0_.buffers();
  for (auto& b : blocks_) {
    auto bs = b->bn.buffers();
    out.insert(out.end(), bs.begin(), bs.end());
  }
  return out;
}

template class Generator<float>;
template class Generator<double>;

}  // namespace gprlab::gan
