#include "gprlab/gan/losses.hpp"

#include <cmath>
#include <random>

#include "gprlab/core/error.hpp"

namespace gprlab::gan {

std::vector<double> interpolation_weights(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> eps(n);
  for (auto& e : eps) e = u(rng);
  return eps;
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::numerical_abort, std::string("non-finite ") + what);
  }
}

template <typename T>
void check_pair(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (!a.same_shape(b)) fail(ErrorCode::shape_mismatch, std::string(what) + ": batch shapes differ");
}

}  // namespace

template <typename T>
T gradient_penalty(Critic<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                   std::uint64_t eps_seed, T weight_scale) {
  check_pair(real, fake, "gradient_penalty");
  const int n = real.n;
  const auto eps = interpolation_weights(n, eps_seed);
  Tensor<T> xhat(real.n, real.c, real.h, real.w);
  const std::size_t m = real.sample_size();
  for (int i = 0; i < n; ++i) {
    const T e = static_cast<T>(eps[i]);
    for (std::size_t k = 0; k < m; ++k)
      xhat.sample(i)[k] = e * real.sample(i)[k] + (T(1) - e) * fake.sample(i)[k];
  }
  critic.forward(xhat);
  const Tensor<T> ones(n, 1, 1, 1, T(1));
  const Tensor<T> g = critic.backward(ones, nullptr, false);

  double penalty = 0;
  Tensor<T> direction(g.n, g.c, g.h, g.w);
  for (int i = 0; i < n; ++i) {
    double sq = 0;
    for (std::size_t k = 0; k < m; ++k) sq += static_cast<double>(g.sample(i)[k]) * g.sample(i)[k];
    const double norm = std::sqrt(sq + 1e-12);
    require_finite(norm, "critic input gradient in the gradient penalty");
    penalty += (norm - 1.0) * (norm - 1.0);
    // d/dw (||g|| - 1)^2 = 2 (||g|| - 1) / ||g|| * d/dw <g, J_w v>|_{v=g}
    const T coef = static_cast<T>(static_cast<double>(weight_scale) / n * 2.0 * (norm - 1.0) / norm);
    for (std::size_t k = 0; k < m; ++k) direction.sample(i)[k] = coef * g.sample(i)[k];
  }
  penalty /= n;
  if (weight_scale != T(0)) {
    critic.tangent(direction);
    critic.tangent_backward(ones);
  }
  return static_cast<T>(penalty);
}

template <typename T>
CriticLossTerms critic_loss(Critic<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                            const std::vector<int>& real_labels, const CriticLossConfig& cfg,
                            std::uint64_t eps_seed, bool accumulate) {
  check_pair(real, fake, "critic_loss");
  const int n = real.n;
  CriticLossTerms terms;

  const auto fo = critic.forward(fake);
  double fake_mean = 0;
  for (T v : fo.scores.data) fake_mean += v;
  fake_mean /= n;
  if (accumulate) critic.backward(Tensor<T>(n, 1, 1, 1, T(1) / n), nullptr, true);

  const auto ro = critic.forward(real);
  double real_mean = 0;
  for (T v : ro.scores.data) real_mean += v;
  real_mean /= n;
  const bool use_aux = cfg.aux_class_weight > 0 && ro.aux_logits.has_value();
  Tensor<T> daux;
  if (use_aux) {
    terms.aux = nn::softmax_cross_entropy(*ro.aux_logits, real_labels, accumulate ? &daux : nullptr);
    for (auto& v : daux.data) v *= static_cast<T>(cfg.aux_class_weight);
  }
  if (accumulate) {
    critic.backward(Tensor<T>(n, 1, 1, 1, -T(1) / n), use_aux ? &daux : nullptr, true);
  }

  terms.wasserstein = fake_mean - real_mean;
  terms.gp = gradient_penalty(critic, real, fake, eps_seed,
                              accumulate ? static_cast<T>(cfg.gp_lambda) : T(0));
  terms.total = terms.wasserstein + cfg.gp_lambda * terms.gp + cfg.aux_class_weight * terms.aux;
  require_finite(terms.total, "critic loss");
  return terms;
}

template <typename T>
T freq_loss(const freq::FrequencyTransform<T>& transform, const Tensor<T>& real,
            const Tensor<T>& fake, Tensor<T>* dfake) {
  check_pair(real, fake, "freq_loss");
  if (real.c != 1 || real.h != transform.rows() || real.w != transform.cols()) {
    fail(ErrorCode::shape_mismatch, "freq_loss: images do not match the transform size");
  }
  const int n = real.n;
  const std::size_t P = static_cast<std::size_t>(transform.out_rows()) * transform.out_cols();
  nn::Buffer<T> pr(P), pf(P), g(P);
  typename freq::FrequencyTransform<T>::Cache cache;
  if (dfake) *dfake = Tensor<T>(fake.n, fake.c, fake.h, fake.w);
  double total = 0;
  const double scale = 1.0 / (static_cast<double>(n) * P);
  for (int i = 0; i < n; ++i) {
    transform.forward(real.sample(i), pr.data());
    transform.forward(fake.sample(i), pf.data(), dfake ? &cache : nullptr);
    for (std::size_t k = 0; k < P; ++k) {
      const T d = pr[k] - pf[k];
      total += std::abs(static_cast<double>(d));
      // d|r - f| / df = -sign(r - f)
      g[k] = static_cast<T>(d > 0 ? -scale : (d < 0 ? scale : 0.0));
    }
    if (dfake) transform.backward(cache, g.data(), dfake->sample(i));
  }
  return static_cast<T>(total * scale);
}

template <typename T>
GeneratorLossTerms generator_loss(Generator<T>& gen, Critic<T>& critic, const Tensor<T>& z,
                                  const std::vector<int>& labels, const Tensor<T>& real,
                                  const GeneratorLossConfig& cfg,
                                  const freq::FrequencyTransform<T>* transform, bool accumulate) {
  const int n = z.n;
  GeneratorLossTerms terms;
  const Tensor<T> fake = gen.forward(z, labels, true);
  const auto out = critic.forward(fake);
  double mean = 0;
  for (T v : out.scores.data) mean += v;
  terms.adversarial = -mean / n;

  const bool use_aux = cfg.aux_class_weight > 0 && out.aux_logits.has_value();
  Tensor<T> daux;
  if (use_aux) {
    terms.aux = nn::softmax_cross_entropy(*out.aux_logits, labels, accumulate ? &daux : nullptr);
    for (auto& v : daux.data) v *= static_cast<T>(cfg.aux_class_weight);
  }
  Tensor<T> dfake;
  if (accumulate) {
    dfake = critic.backward(Tensor<T>(n, 1, 1, 1, -T(1) / n), use_aux ? &daux : nullptr, false);
  }
  if (cfg.freq_loss_weight > 0) {
    require(transform != nullptr, ErrorCode::invalid_argument,
            "generator_loss: frequency loss enabled without a transform");
    Tensor<T> dfreq;
    terms.freq = freq_loss(*transform, real, fake, accumulate ? &dfreq : nullptr);
    if (accumulate) {
      const T w = static_cast<T>(cfg.freq_loss_weight);
      for (std::size_t k = 0; k < dfake.size(); ++k) dfake.data[k] += w * dfreq.data[k];
    }
  }
  terms.total = terms.adversarial + cfg.freq_loss_weight * terms.freq +
                cfg.aux_class_weight * terms.aux;
  require_finite(terms.total, "generator loss");
  if (accumulate) gen.backward(dfake);
  return terms;
}

#define GPRLAB_INSTANTIATE(T)                                                                  \
  template T gradient_penalty<T>(Critic<T>&, const Tensor<T>&, const Tensor<T>&, std::uint64_t, \
                                 T);                                                           \
  template CriticLossTerms critic_loss<T>(Critic<T>&, const Tensor<T>&, const Tensor<T>&,       \
                                          const std::vector<int>&, const CriticLossConfig&,     \
                                          std::uint64_t, bool);                                 \
  template T freq_loss<T>(const freq::FrequencyTransform<T>&, const Tensor<T>&,                 \
                          const Tensor<T>&, Tensor<T>*);                                        \
  template GeneratorLossTerms generator_loss<T>(                                                \
      Generator<T>&, Critic<T>&, const Tensor<T>&, const std::vector<int>&, const Tensor<T>&,   \
      const GeneratorLossConfig&, const freq::FrequencyTransform<T>*, bool);

GPRLAB_INSTANTIATE(float)
GPRLAB_INSTANTIATE(double)

#undef GPRLAB_INSTANTIATE

}  // namespace gprlab::gan
