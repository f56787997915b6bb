#pragma once

#include <cstdint>
#include <vector>

#include "gprlab/nn/tensor.hpp"

namespace gprlab::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double epsilon = 1e-7;
};

/// Adam over a fixed parameter list; moment buffers are exposed as Params
/// (named "<param>.adam_m" / ".adam_v") so they checkpoint like weights.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig cfg);

  /// One update from the accumulated gradients; gradients are not cleared.
  void step();
  void zero_grad();

  std::int64_t steps() const { return t_; }
  void set_steps(std::int64_t t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<Param<T>*> state();

 private:
  std::vector<Param<T>*> params_;
  std::vector<Param<T>> m_, v_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace gprlab::nn
