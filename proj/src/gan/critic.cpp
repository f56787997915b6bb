#include "gprlab/gan/critic.hpp"

#include "gprlab/core/error.hpp"
#include "gprlab/gan/generator.hpp"

namespace gprlab::gan {

int CriticSpec::conv_count() const {
  return num_convs >= 0 ? num_convs : num_resolution_steps(image_size);
}

std::vector<int> CriticSpec::filters() const {
  std::vector<int> f;
  for (int i = 0; i < conv_count(); ++i) f.push_back(16 << i);
  return f;
}

int CriticSpec::flatten_size() const {
  int s = image_size;
  for (int i = 0; i < conv_count(); ++i) s = (s + 1) / 2;
  const int c = conv_count() ? filters().back() : 1;
  return s * s * c;
}

void CriticSpec::validate() const {
  require(image_size >= 1 && kernel >= 1 && num_classes >= 1, ErrorCode::invalid_argument,
          "critic: image_size, kernel and num_classes must be positive");
  require(num_convs >= 0 || valid_image_size(image_size), ErrorCode::invalid_argument,
          "critic: image_size must be a power of two in [16, 256]");
}

template <typename T>
Critic<T>::Critic(const CriticSpec& spec)
    : spec_((spec.validate(), spec)), head_("critic.dense", spec.flatten_size(), 1) {
  int in = 1;
  int i = 0;
  for (int f : spec.filters()) {
    convs_.push_back(std::make_unique<nn::Conv2d<T>>("critic.conv" + std::to_string(i++), in, f,
                                                     spec.kernel, 2));
    acts_.emplace_back(static_cast<T>(spec.leaky_slope));
    in = f;
  }
  if (spec.aux_head) aux_.emplace("critic.aux_dense", spec.flatten_size(), spec.num_classes);
}

template <typename T>
void Critic<T>::init(std::mt19937_64& rng) {
  for (auto& c : convs_) c->init(rng);
  head_.init(rng);
  if (aux_) aux_->init(rng);
}

template <typename T>
CriticOutput<T> Critic<T>::forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace) {
  if (x.c != 1 || x.h != spec_.image_size || x.w != spec_.image_size) {
    fail(ErrorCode::shape_mismatch,
         "critic: expected input (n, " + std::to_string(spec_.image_size) + ", " +
             std::to_string(spec_.image_size) + ", 1), got " + nn::format_shape(nn::nhwc_shape(x)));
  }
  auto rec = [&](const char* op, const Tensor<T>& t) {
    if (trace) trace->push_back({op, nn::nhwc_shape(t)});
  };
  rec("Input", x);
  Tensor<T> h = x;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = convs_[i]->forward(h);
    rec("Conv2D", h);
    h = acts_[i].forward(h);
    rec("LeakyReLU", h);
  }
  feat_c_ = h.c;
  feat_h_ = h.h;
  feat_w_ = h.w;
  h.c = static_cast<int>(h.sample_size());
  h.h = h.w = 1;
  if (trace) trace->push_back({"Flatten", {h.n, h.c}});
  CriticOutput<T> out;
  out.scores = head_.forward(h);
  rec("Dense", out.scores);
  if (aux_) out.aux_logits = aux_->forward(h);
  return out;
}

template <typename T>
Tensor<T> Critic<T>::backward(const Tensor<T>& dscores, const Tensor<T>* daux, bool param_grads) {
  Tensor<T> g = head_.backward(dscores, param_grads);
  if (aux_ && daux) {
    Tensor<T> ga = aux_->backward(*daux, param_grads);
    for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += ga.data[k];
  }
  g.c = feat_c_;
  g.h = feat_h_;
  g.w = feat_w_;
  for (std::size_t i = convs_.size(); i-- > 0;) {
    g = acts_[i].backward(g);
    g = convs_[i]->backward(g, param_grads);
  }
  return g;
}

template <typename T>
Tensor<T> Critic<T>::tangent(const Tensor<T>& dx) {
  Tensor<T> h = dx;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = convs_[i]->tangent(h);
    h = acts_[i].tangent(h);
  }
  h.c = static_cast<int>(h.sample_size());
  h.h = h.w = 1;
  return head_.tangent(h);
}

template <typename T>
void Critic<T>::tangent_backward(const Tensor<T>& dseed) {
  Tensor<T> g = head_.tangent_backward(dseed);
  g.c = feat_c_;
  g.h = feat_h_;
  g.w = feat_w_;
  for (std::size_t i = convs_.size(); i-- > 0;) {
    g = acts_[i].backward(g);
    if (i == 0) {
      // The input perturbation is not a parameter; skip its gradient.
      const bool keep = convs_[0]->need_input_grad;
      convs_[0]->need_input_grad = false;
      convs_[0]->tangent_backward(g);
      convs_[0]->need_input_grad = keep;
    } else {
      g = convs_[i]->tangent_backward(g);
    }
  }
}

template <typename T>
std::vector<Param<T>*> Critic<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& c : convs_) {
    auto ps = c->params();
    out.insert(out.end(), ps.begin(), ps.end());
  }
  auto hp = head_.params();
  out.insert(out.end(), hp.begin(), hp.end());
  if (aux_) {
    auto ap = aux_->params();
    out.insert(out.end(), ap.begin(), ap.end());
  }
  return out;
}

template class Critic<float>;
template class Critic<double>;

}  // namespace gprlab::gan
