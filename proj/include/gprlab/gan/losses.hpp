#pragma once

#include <cstdint>
#include <vector>

#include "gprlab/freq/frequency_bscan.hpp"
#include "gprlab/gan/critic.hpp"
#include "gprlab/gan/generator.hpp"

namespace gprlab::gan {

/// Interpolation weights eps_i ~ U[0, 1), one per sample, from `seed`.
std::vector<double> interpolation_weights(int n, std::uint64_t seed);

/// Mean over the batch of (||grad_x D(x_hat)||_2 - 1)^2 with
/// x_hat = eps * real + (1 - eps) * fake. Unscaled. When `weight_scale` is
/// non-zero, weight_scale * d penalty / d w is added to the critic's
/// parameter gradients.
template <typename T>
T gradient_penalty(Critic<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                   std::uint64_t eps_seed, T weight_scale = T(0));

struct CriticLossConfig {
  double gp_lambda = 10.0;
  double aux_class_weight = 0.0;
};

struct CriticLossTerms {
  double wasserstein = 0;  // mean D(fake) - mean D(real)
  double gp = 0;           // unscaled penalty
  double aux = 0;          // cross entropy of the aux head on real images
  double total = 0;
};

/// Critic objective; accumulates its parameter gradients when
/// `accumulate` is set. `real_labels` may be empty when the aux head is off.
template <typename T>
CriticLossTerms critic_loss(Critic<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                            const std::vector<int>& real_labels, const CriticLossConfig& cfg,
                            std::uint64_t eps_seed, bool accumulate);

/// Mean absolute pixel difference between the frequency images of two
/// batches, with an optional gradient with respect to `fake`.
template <typename T>
T freq_loss(const freq::FrequencyTransform<T>& transform, const Tensor<T>& real,
            const Tensor<T>& fake, Tensor<T>* dfake = nullptr);

struct GeneratorLossConfig {
  double freq_loss_weight = 1.0;
  double aux_class_weight = 0.0;
};

struct GeneratorLossTerms {
  double adversarial = 0;  // -mean D(G(z))
  double freq = 0;         // unweighted frequency loss
  double aux = 0;
  double total = 0;
};

/// Generator objective for conditioning labels `labels` and the paired real
/// batch. Runs the generator in training mode. Accumulates generator
/// gradients when `accumulate` is set; critic gradients are never touched.
template <typename T>
GeneratorLossTerms generator_loss(Generator<T>& gen, Critic<T>& critic, const Tensor<T>& z,
                                  const std::vector<int>& labels, const Tensor<T>& real,
                                  const GeneratorLossConfig& cfg,
                                  const freq::FrequencyTransform<T>* transform, bool accumulate);

}  // namespace gprlab::gan
