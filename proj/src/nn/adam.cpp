#include "gprlab/nn/adam.hpp"

#include <cmath>

namespace gprlab::nn {

template <typename T>
Adam<T>::Adam(std::vector<Param<T>*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (auto* p : params_) {
    m_.emplace_back(p->name + ".adam_m", p->shape, false);
    v_.emplace_back(p->name + ".adam_v", p->shape, false);
  }
}

template <typename T>
void Adam<T>::step() {
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = cfg_.learning_rate;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Param<T>& p = *params_[k];
    T* m = m_[k].value.data();
    T* v = v_[k].value.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = static_cast<T>(b1 * m[i] + (1 - b1) * g);
      v[i] = static_cast<T>(b2 * v[i] + (1 - b2) * g * g);
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p.value[i] = static_cast<T>(p.value[i] - lr * mhat / (std::sqrt(vhat) + cfg_.epsilon));
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

template <typename T>
std::vector<Param<T>*> Adam<T>::state() {
  std::vector<Param<T>*> out;
  for (auto& p : m_) out.push_back(&p);
  for (auto& p : v_) out.push_back(&p);
  return out;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace gprlab::nn
