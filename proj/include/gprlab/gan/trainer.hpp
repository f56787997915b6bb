#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gprlab/core/dataset.hpp"
#include "gprlab/gan/model.hpp"

namespace gprlab::gan {

/// One optimizer update. Critic rows fill critic_loss and gp; generator rows
/// fill gen_loss and freq_loss, plus val_loss when an evaluation ran. Unused
/// cells hold NaN and are written blank.
struct TrainLogRow {
  std::int64_t step = 0;
  double critic_loss = 0;
  double gen_loss = 0;
  double gp = 0;
  double freq_loss = 0;
  double val_loss = 0;
};

struct TrainOptions {
  /// Written whenever the validation moving average improves.
  std::optional<std::filesystem::path> best_checkpoint_dir;
  /// Written when training ends.
  std::optional<std::filesystem::path> last_checkpoint_dir;
  /// Load the best-validation weights back into the model before returning.
  bool restore_best = false;
  std::function<void(const TrainLogRow&)> on_row;
};

struct TrainResult {
  std::vector<TrainLogRow> log;
  std::int64_t best_step = -1;
  bool early_stopped = false;
};

/// Alternates n_critic critic updates with one generator update until
/// config.max_steps generator steps or early stopping. Validation loss is the
/// critic's Wasserstein estimate mean D(real) - mean D(G(z)) on a held-out
/// split with fixed latents, smoothed over ma_window evaluations. Resumes
/// from model.step. Per-step randomness derives from (seed, step), so runs
/// are reproducible. A non-finite loss raises numerical_abort naming the
/// last good checkpoint.
TrainResult train_wgan_gp(GanModel& model, std::span<const LabeledImage> data,
                          const TrainOptions& opts = {});

void write_training_log(const std::filesystem::path& path, const std::vector<TrainLogRow>& rows);

}  // namespace gprlab::gan
