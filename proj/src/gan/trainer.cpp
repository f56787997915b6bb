#include "gprlab/gan/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "gprlab/core/error.hpp"
#include "gprlab/gan/losses.hpp"
#include "gprlab/sim/random_field.hpp"

namespace gprlab::gan {

namespace {

constexpr double kBlank = std::numeric_limits<double>::quiet_NaN();

struct Batch {
  Tensor<float> images;
  std::vector<int> labels;
};

Batch gather(std::span<const LabeledImage> data, const std::vector<std::size_t>& pool,
             int n, int size, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  Batch b{Tensor<float>(n, 1, size, size), std::vector<int>(n)};
  for (int i = 0; i < n; ++i) {
    const auto& item = data[pool[pick(rng)]];
    std::copy_n(item.image.pixels.data(), static_cast<std::size_t>(size) * size, b.images.sample(i));
    b.labels[i] = class_id(*item.label);
  }
  return b;
}

std::vector<nn::Buffer<float>> snapshot(GanModel& m) {
  std::vector<nn::Buffer<float>> s;
  for (auto* p : m.all_tensors()) s.push_back(p->value);
  return s;
}

void restore(GanModel& m, const std::vector<nn::Buffer<float>>& s) {
  auto tensors = m.all_tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) tensors[i]->value = s[i];
}

}  // namespace

TrainResult train_wgan_gp(GanModel& model, std::span<const LabeledImage> data,
                          const TrainOptions& opts) {
  const GanConfig& cfg = model.config;
  const int S = cfg.image_size;
  require(!data.empty(), ErrorCode::invalid_argument, "train_wgan_gp: dataset is empty");
  for (const auto& item : data) {
    require(item.label.has_value(), ErrorCode::invalid_argument,
            "train_wgan_gp: every training image needs a label");
    require(item.image.rows() == S && item.image.cols() == S, ErrorCode::shape_mismatch,
            "train_wgan_gp: images must be " + std::to_string(S) + "x" + std::to_string(S));
  }

  // Deterministic train / validation split.
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 split_rng(sim::splitmix64(cfg.seed ^ 0x73706c6974ULL));
  std::shuffle(order.begin(), order.end(), split_rng);
  std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * data.size()));
  if (cfg.validation_fraction > 0 && n_val == 0 && data.size() >= 2) n_val = 1;
  const std::vector<std::size_t> val(order.begin(), order.begin() + n_val);
  const std::vector<std::size_t> train(order.begin() + n_val, order.end());

  Tensor<float> val_real(static_cast<int>(n_val), 1, S, S);
  std::vector<int> val_labels(n_val);
  for (std::size_t i = 0; i < n_val; ++i) {
    std::copy_n(data[val[i]].image.pixels.data(), static_cast<std::size_t>(S) * S,
                val_real.sample(static_cast<int>(i)));
    val_labels[i] = class_id(*data[val[i]].label);
  }
  std::mt19937_64 val_rng(sim::splitmix64(cfg.seed ^ 0x76616cULL));
  const Tensor<float> val_z = latent_batch<float>(static_cast<int>(n_val), cfg.latent_dim, val_rng);

  const freq::SpectrogramConfig spec_cfg{.reduction = cfg.freq_reduction};
  std::optional<freq::FrequencyTransform<float>> transform;
  if (cfg.freq_loss_weight > 0) transform.emplace(S, S, spec_cfg);

  const CriticLossConfig ccfg{cfg.gp_lambda, cfg.aux_class_weight};
  const GeneratorLossConfig gcfg{cfg.freq_loss_weight, cfg.aux_class_weight};
  const int m = cfg.batch_size;

  TrainResult result;
  std::deque<double> recent;
  double best_ma = std::numeric_limits<double>::infinity();
  int bad_evals = 0;
  std::optional<std::vector<nn::Buffer<float>>> best_state;
  std::string last_good = "none";

  auto emit = [&](const TrainLogRow& row) {
    result.log.push_back(row);
    if (opts.on_row) opts.on_row(row);
  };
  auto abort = [&](const Error& e) {
    fail(ErrorCode::numerical_abort, std::string(e.what()) + " at step " +
                                         std::to_string(model.step) +
                                         "; last good checkpoint: " + last_good);
  };

  while (model.step < cfg.max_steps) {
    std::mt19937_64 rng(sim::splitmix64(cfg.seed + 0x9e3779b97f4a7c15ULL * (model.step + 1)));
    try {
      for (int t = 0; t < cfg.n_critic; ++t) {
        Batch real = gather(data, train, m, S, rng);
        const Tensor<float> z = latent_batch<float>(m, cfg.latent_dim, rng);
        const Tensor<float> fake = model.generator.forward(z, real.labels, true);
        model.critic_opt.zero_grad();
        const auto terms = critic_loss(model.critic, real.images, fake, real.labels, ccfg, rng(), true);
        model.critic_opt.step();
        emit({model.step, terms.total, kBlank, terms.gp, kBlank, kBlank});
      }
      Batch real = gather(data, train, m, S, rng);
      const Tensor<float> z = latent_batch<float>(m, cfg.latent_dim, rng);
      model.generator_opt.zero_grad();
      const auto g = generator_loss(model.generator, model.critic, z, real.labels, real.images, gcfg,
                                    transform ? &*transform : nullptr, true);
      model.generator_opt.step();
      ++model.step;

      TrainLogRow row{model.step - 1, kBlank, g.total, kBlank, g.freq, kBlank};
      if (cfg.freq_loss_weight <= 0) row.freq_loss = kBlank;
      if (n_val > 0 && model.step % cfg.eval_every == 0) {
        const auto real_scores = model.critic.forward(val_real).scores;
        const Tensor<float> val_fake = model.generator.forward(val_z, val_labels, false);
        const auto fake_scores = model.critic.forward(val_fake).scores;
        double w = 0;
        for (std::size_t i = 0; i < n_val; ++i) w += real_scores.data[i] - fake_scores.data[i];
        w /= static_cast<double>(n_val);
        if (!std::isfinite(w)) fail(ErrorCode::numerical_abort, "non-finite validation loss");
        row.val_loss = w;
        recent.push_back(w);
        if (static_cast<int>(recent.size()) > cfg.ma_window) recent.pop_front();
        const double ma = std::accumulate(recent.begin(), recent.end(), 0.0) / recent.size();
        if (model.step >= cfg.warmup_steps) {
          if (ma < best_ma) {
            best_ma = ma;
            bad_evals = 0;
            result.best_step = model.step;
            if (opts.restore_best) best_state = snapshot(model);
            if (opts.best_checkpoint_dir) {
              save_checkpoint(model, *opts.best_checkpoint_dir);
              last_good = opts.best_checkpoint_dir->string();
            }
          } else if (++bad_evals >= cfg.patience) {
            result.early_stopped = true;
          }
        }
      }
      emit(row);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::numerical_abort) abort(e);
      throw;
    }
    if (result.early_stopped) break;
  }

  if (opts.last_checkpoint_dir) save_checkpoint(model, *opts.last_checkpoint_dir);
  if (opts.restore_best && best_state) {
    const auto step = model.step;
    restore(model, *best_state);
    model.step = step;
  }
  return result;
}

void write_training_log(const std::filesystem::path& path, const std::vector<TrainLogRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << "step,critic_loss,gen_loss,gp,freq_loss,val_loss\n";
  auto cell = [](double v) {
    if (std::isnan(v)) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << r.step << ',' << cell(r.critic_loss) << ',' << cell(r.gen_loss) << ',' << cell(r.gp)
        << ',' << cell(r.freq_loss) << ',' << cell(r.val_loss) << '\n';
  }
}

}  // namespace gprlab::gan
