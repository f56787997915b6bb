#include "gprlab/clf/classifier.hpp"

#include <cmath>

#include "gprlab/core/error.hpp"

namespace gprlab::clf {

void ClassifierSpec::validate() const {
  require(image_size >= 4 && num_classes >= 1, ErrorCode::invalid_argument,
          "classifier: image_size must be >= 4 and num_classes >= 1");
}

namespace {

template <typename T>
void check_input(const Tensor<T>& x, const ClassifierSpec& s, const char* what) {
  if (x.c != 1 || x.h != s.image_size || x.w != s.image_size) {
    fail(ErrorCode::shape_mismatch, std::string(what) + ": expected input (n, " +
                                        std::to_string(s.image_size) + ", " +
                                        std::to_string(s.image_size) + ", 1), got " +
                                        nn::format_shape(nn::nhwc_shape(x)));
  }
}

template <typename T>
Tensor<T> flat(Tensor<T> t) {
  t.c = static_cast<int>(t.sample_size());
  t.h = t.w = 1;
  return t;
}

}  // namespace

template <typename T>
Trunk<T>::Trunk(const std::string& prefix, const ClassifierSpec& spec)
    : conv0(prefix + ".conv0", 1, 2, 1, 2),
      conv1(prefix + ".conv1", 2, 4, 1, 2),
      act0_(static_cast<T>(spec.leaky_slope)),
      act1_(static_cast<T>(spec.leaky_slope)) {
  conv0.need_input_grad = false;
}

template <typename T>
void Trunk<T>::init(std::mt19937_64& rng) {
  conv0.init(rng);
  conv1.init(rng);
}

template <typename T>
Tensor<T> Trunk<T>::forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace) {
  auto rec = [&](const char* op, const Tensor<T>& t) {
    if (trace) trace->push_back({op, nn::nhwc_shape(t)});
  };
  Tensor<T> h = conv0.forward(x);
  rec("Conv2D", h);
  h = act0_.forward(h);
  rec("LeakyReLU", h);
  h = conv1.forward(h);
  rec("Conv2D", h);
  h = act1_.forward(h);
  rec("LeakyReLU", h);
  return h;
}

template <typename T>
void Trunk<T>::backward(const Tensor<T>& dy) {
  Tensor<T> g = act1_.backward(dy);
  g = conv1.backward(g);
  g = act0_.backward(g);
  conv0.backward(g);
}

template <typename T>
std::vector<Param<T>*> Trunk<T>::params() {
  return {&conv0.weight, &conv0.bias, &conv1.weight, &conv1.bias};
}

template <typename T>
SingleClassifier<T>::SingleClassifier(const ClassifierSpec& spec)
    : trunk("classifier.trunk", spec),
      head("classifier.dense", spec.flatten_size(), spec.num_classes),
      spec_(spec) {
  spec.validate();
}

template <typename T>
void SingleClassifier<T>::init(std::mt19937_64& rng) {
  trunk.init(rng);
  head.init(rng);
}

template <typename T>
Tensor<T> SingleClassifier<T>::forward(const Tensor<T>& x, std::vector<ShapeRecord>* trace) {
  check_input(x, spec_, "classify_single");
  if (trace) trace->push_back({"Input B-scan", nn::nhwc_shape(x)});
  Tensor<T> h = flat(trunk.forward(x, trace));
  if (trace) trace->push_back({"Flatten", nn::nhwc_shape(h)});
  Tensor<T> logits = head.forward(h);
  if (trace) trace->push_back({"Dense", nn::nhwc_shape(logits)});
  return logits;
}

template <typename T>
void SingleClassifier<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> g = head.backward(dlogits);
  const int s = spec_.trunk_size();
  g.c = spec_.trunk_channels();
  g.h = g.w = s;
  trunk.backward(g);
}

template <typename T>
std::vector<Param<T>*> SingleClassifier<T>::params() {
  auto p = trunk.params();
  p.push_back(&head.weight);
  p.push_back(&head.bias);
  return p;
}

template <typename T>
CombinedClassifier<T>::CombinedClassifier(const ClassifierSpec& spec, bool aux_heads)
    : time_trunk("classifier.time_trunk", spec),
      freq_trunk("classifier.freq_trunk", spec),
      head("classifier.dense", spec.flatten_size(), spec.num_classes),
      spec_(spec) {
  spec.validate();
  if (aux_heads) {
    aux_time_head.emplace("classifier.aux_time", spec.flatten_size(), spec.num_classes);
    aux_freq_head.emplace("classifier.aux_freq", spec.flatten_size(), spec.num_classes);
  }
}

template <typename T>
void CombinedClassifier<T>::init(std::mt19937_64& rng) {
  time_trunk.init(rng);
  freq_trunk.init(rng);
  head.init(rng);
  if (aux_time_head) {
    aux_time_head->init(rng);
    aux_freq_head->init(rng);
  }
}

template <typename T>
CombinedOutput<T> CombinedClassifier<T>::forward(const Tensor<T>& x_time, const Tensor<T>& x_freq,
                                                 std::vector<ShapeRecord>* trace) {
  check_input(x_time, spec_, "classify_combined (time)");
  check_input(x_freq, spec_, "classify_combined (frequency)");
  if (x_time.n != x_freq.n) fail(ErrorCode::shape_mismatch, "classify_combined: batch sizes differ");
  if (trace) {
    trace->push_back({"Input Time B-scan", nn::nhwc_shape(x_time)});
    trace->push_back({"Input Frequency B-scan", nn::nhwc_shape(x_freq)});
  }
  const Tensor<T> t = time_trunk.forward(x_time);
  if (trace) trace->push_back({"SingleClassifier(Time B-scan)", nn::nhwc_shape(t)});
  const Tensor<T> f = freq_trunk.forward(x_freq);
  if (trace) trace->push_back({"SingleClassifier(Frequency B-scan)", nn::nhwc_shape(f)});
  if (!t.same_shape(f)) fail(ErrorCode::shape_mismatch, "classify_combined: branch shapes differ");
  Tensor<T> merged = t;
  for (std::size_t k = 0; k < merged.size(); ++k) merged.data[k] *= f.data[k];
  if (trace) trace->push_back({"Multiply", nn::nhwc_shape(merged)});
  ft_ = flat(t);
  ff_ = flat(f);
  merged = flat(std::move(merged));
  if (trace) trace->push_back({"Flatten", nn::nhwc_shape(merged)});
  CombinedOutput<T> out;
  out.logits = head.forward(merged);
  if (trace) trace->push_back({"Dense", nn::nhwc_shape(out.logits)});
  if (aux_time_head) {
    out.aux_time = aux_time_head->forward(ft_);
    out.aux_freq = aux_freq_head->forward(ff_);
  }
  return out;
}

template <typename T>
void CombinedClassifier<T>::backward(const Tensor<T>& dlogits, const Tensor<T>* daux_time,
                                     const Tensor<T>* daux_freq) {
  const Tensor<T> dm = head.backward(dlogits);
  Tensor<T> dt(dm.n, spec_.trunk_channels(), spec_.trunk_size(), spec_.trunk_size());
  Tensor<T> df = dt;
  for (std::size_t k = 0; k < dm.size(); ++k) {
    dt.data[k] = dm.data[k] * ff_.data[k];
    df.data[k] = dm.data[k] * ft_.data[k];
  }
  if (aux_time_head && daux_time) {
    const Tensor<T> g = aux_time_head->backward(*daux_time);
    for (std::size_t k = 0; k < g.size(); ++k) dt.data[k] += g.data[k];
  }
  if (aux_freq_head && daux_freq) {
    const Tensor<T> g = aux_freq_head->backward(*daux_freq);
    for (std::size_t k = 0; k < g.size(); ++k) df.data[k] += g.data[k];
  }
  time_trunk.backward(dt);
  freq_trunk.backward(df);
}

template <typename T>
std::vector<Param<T>*> CombinedClassifier<T>::params() {
  auto p = time_trunk.params();
  auto f = freq_trunk.params();
  p.insert(p.end(), f.begin(), f.end());
  p.push_back(&head.weight);
  p.push_back(&head.bias);
  if (aux_time_head) {
    for (auto* q : aux_time_head->params()) p.push_back(q);
    for (auto* q : aux_freq_head->params()) p.push_back(q);
  }
  return p;
}

template <typename T>
T cross_entropy(const Tensor<T>& probs, const Tensor<T>& one_hot) {
  if (!probs.same_shape(one_hot)) fail(ErrorCode::shape_mismatch, "cross_entropy: shapes differ");
  double total = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (one_hot.data[k] != T(0)) {
      total -= one_hot.data[k] * std::log(std::max<double>(probs.data[k], nn::kLogClamp));
    }
  }
  return static_cast<T>(total / probs.n);
}

template class Trunk<float>;
template class Trunk<double>;
template class SingleClassifier<float>;
template class SingleClassifier<double>;
template class CombinedClassifier<float>;
template class CombinedClassifier<double>;
template float cross_entropy<float>(const Tensor<float>&, const Tensor<float>&);
template double cross_entropy<double>(const Tensor<double>&, const Tensor<double>&);

}  // namespace gprlab::clf
