#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gprlab/core/bscan.hpp"
#include "gprlab/freq/stft.hpp"
#include "gprlab/gan/critic.hpp"
#include "gprlab/gan/generator.hpp"
#include "gprlab/nn/adam.hpp"

namespace gprlab::gan {

struct GanConfig {
  int image_size = 256;
  int latent_dim = 100;
  double gp_lambda = 10.0;
  int n_critic = 5;
  double learning_rate = 3e-4;
  int batch_size = 16;
  double adam_beta1 = 0.0;
  double adam_beta2 = 0.9;
  double adam_epsilon = 1e-7;
  double freq_loss_weight = 1.0;
  double aux_class_weight = 0.0;  // > 0 enables the critic's class head
  double validation_fraction = 0.1;
  int patience = 20;      // evaluations without improvement before stopping
  int eval_every = 10;    // generator steps between validation evaluations
  int ma_window = 10;     // evaluations in the validation moving average
  int warmup_steps = 50;  // generator steps before best-tracking starts
  int max_steps = 2000;   // total generator steps
  std::uint64_t seed = 0;
  freq::Reduction freq_reduction = freq::Reduction::max_magnitude;

  GeneratorSpec generator_spec() const;
  CriticSpec critic_spec() const;
  void validate() const;

  bool operator==(const GanConfig&) const = default;
};

/// JSON object with every field; parsing rejects unknown keys and fills
/// missing ones with defaults.
std::string gan_config_to_json(const GanConfig& cfg);
GanConfig gan_config_from_json(const std::string& text);
/// SHA-256 of the canonical JSON form.
std::string gan_config_hash(const GanConfig& cfg);

/// Generator, critic and their optimizers. Not copyable or movable: the
/// optimizers hold pointers into the networks.
struct GanModel {
  explicit GanModel(const GanConfig& cfg);
  GanModel(const GanModel&) = delete;
  GanModel& operator=(const GanModel&) = delete;

  GanConfig config;
  Generator<float> generator;
  Critic<float> critic;
  nn::Adam<float> generator_opt;
  nn::Adam<float> critic_opt;
  std::int64_t step = 0;

  /// Every persisted tensor: weights, batch-norm buffers, optimizer moments.
  std::vector<nn::Param<float>*> all_tensors();
};

/// Directory with model.json plus one float32 blob per tensor.
void save_checkpoint(GanModel& model, const std::filesystem::path& dir);
std::unique_ptr<GanModel> load_checkpoint(const std::filesystem::path& dir);

/// Inference-mode samples, one per requested label; z ~ N(0, 1) drawn from
/// `seed`. Images are tagged as time-domain.
std::vector<RadarImage> sample_conditional(GanModel& model, const std::vector<ClassLabel>& labels,
                                           std::uint64_t seed);

/// n x latent_dim standard normal draws.
template <typename T>
nn::Tensor<T> latent_batch(int n, int latent_dim, std::mt19937_64& rng);

}  // namespace gprlab::gan
