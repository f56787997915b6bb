#include "gprlab/nn/tensor.hpp"

#include <functional>
#include <numeric>

namespace gprlab::nn {

template <typename T>
Param<T>::Param(std::string name_, std::vector<int> shape_, bool trainable_)
    : name(std::move(name_)), shape(std::move(shape_)), trainable(trainable_) {
  const std::size_t count =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  value.assign(count, T(0));
  if (trainable) grad.assign(count, T(0));
}

template struct Param<float>;
template struct Param<double>;

std::string format_shape(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += i == 0 ? std::string("n") : std::to_string(shape[i]);
  }
  return s + ")";
}

}  // namespace gprlab::nn
