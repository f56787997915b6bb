#include "gprlab/gan/model.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "gprlab/core/error.hpp"
#include "gprlab/core/hash.hpp"
#include "gprlab/nn/blob_io.hpp"
#include "gprlab/sim/random_field.hpp"

namespace gprlab::gan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

json to_json(const GanConfig& c) {
  return json{{"image_size", c.image_size},
              {"latent_dim", c.latent_dim},
              {"gp_lambda", c.gp_lambda},
              {"n_critic", c.n_critic},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"freq_loss_weight", c.freq_loss_weight},
              {"aux_class_weight", c.aux_class_weight},
              {"validation_fraction", c.validation_fraction},
              {"patience", c.patience},
              {"eval_every", c.eval_every},
              {"ma_window", c.ma_window},
              {"warmup_steps", c.warmup_steps},
              {"max_steps", c.max_steps},
              {"seed", c.seed},
              {"freq_reduction", std::string(freq::to_string(c.freq_reduction))}};
}

GanConfig from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::config_error, "gan config must be a JSON object");
  const json defaults = to_json(GanConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) fail(ErrorCode::config_error, "unknown gan config key '" + key + "'");
  }
  GanConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("image_size", c.image_size);
    get("latent_dim", c.latent_dim);
    get("gp_lambda", c.gp_lambda);
    get("n_critic", c.n_critic);
    get("learning_rate", c.learning_rate);
    get("batch_size", c.batch_size);
    get("adam_beta1", c.adam_beta1);
    get("adam_beta2", c.adam_beta2);
    get("adam_epsilon", c.adam_epsilon);
    get("freq_loss_weight", c.freq_loss_weight);
    get("aux_class_weight", c.aux_class_weight);
    get("validation_fraction", c.validation_fraction);
    get("patience", c.patience);
    get("eval_every", c.eval_every);
    get("ma_window", c.ma_window);
    get("warmup_steps", c.warmup_steps);
    get("max_steps", c.max_steps);
    get("seed", c.seed);
    if (j.contains("freq_reduction")) {
      c.freq_reduction = freq::reduction_from_string(j.at("freq_reduction").get<std::string>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config_error, std::string("gan config: ") + e.what());
  }
  c.validate();
  return c;
}

json spec_json(const GeneratorSpec& s) {
  return json{{"latent_dim", s.latent_dim}, {"num_classes", s.num_classes},
              {"image_size", s.image_size}, {"kernel", s.kernel},
              {"bn_momentum", s.bn_momentum}, {"bn_eps", s.bn_eps}};
}

json spec_json(const CriticSpec& s) {
  return json{{"image_size", s.image_size}, {"kernel", s.kernel},
              {"leaky_slope", s.leaky_slope}, {"aux_head", s.aux_head},
              {"num_classes", s.num_classes}, {"filters", s.filters()},
              {"flatten_size", s.flatten_size()}};
}

}  // namespace

GeneratorSpec GanConfig::generator_spec() const {
  GeneratorSpec s;
  s.latent_dim = latent_dim;
  s.image_size = image_size;
  return s;
}

CriticSpec GanConfig::critic_spec() const {
  CriticSpec s;
  s.image_size = image_size;
  s.aux_head = aux_class_weight > 0;
  return s;
}

void GanConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::config_error, "gan config: " + m); };
  if (!valid_image_size(image_size)) bad("image_size must be a power of two in [16, 256]");
  if (latent_dim < 1) bad("latent_dim must be positive");
  if (!(gp_lambda >= 0)) bad("gp_lambda must be >= 0");
  if (n_critic < 1) bad("n_critic must be >= 1");
  if (!(learning_rate > 0)) bad("learning_rate must be positive");
  if (batch_size < 1) bad("batch_size must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1)) {
    bad("adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0)) bad("adam_epsilon must be positive");
  if (!(freq_loss_weight >= 0)) bad("freq_loss_weight must be >= 0");
  if (!(aux_class_weight >= 0)) bad("aux_class_weight must be >= 0");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) {
    bad("validation_fraction must lie in [0, 1)");
  }
  if (patience < 1 || eval_every < 1 || ma_window < 1) {
    bad("patience, eval_every and ma_window must be positive");
  }
  if (warmup_steps < 0 || max_steps < 0) bad("warmup_steps and max_steps must be >= 0");
}

std::string gan_config_to_json(const GanConfig& cfg) { return to_json(cfg).dump(2); }

GanConfig gan_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config_error, std::string("gan config: ") + e.what());
  }
  return from_json(j);
}

std::string gan_config_hash(const GanConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

GanModel::GanModel(const GanConfig& cfg)
    : config((cfg.validate(), cfg)),
      generator(cfg.generator_spec()),
      critic(cfg.critic_spec()),
      generator_opt(generator.params(),
                    {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon}),
      critic_opt(critic.params(), {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon}) {
  std::mt19937_64 rng(sim::splitmix64(cfg.seed ^ 0x67656e6572ULL));
  generator.init(rng);
  critic.init(rng);
}

std::vector<nn::Param<float>*> GanModel::all_tensors() {
  std::vector<nn::Param<float>*> out;
  auto add = [&](std::vector<nn::Param<float>*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  add(generator.params());
  add(generator.buffers());
  add(critic.params());
  add(generator_opt.state());
  add(critic_opt.state());
  return out;
}

void save_checkpoint(GanModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  const auto tensors = model.all_tensors();
  nn::save_params(dir, tensors);
  json j;
  j["format"] = "gprlab-gan-checkpoint";
  j["version"] = kCheckpointVersion;
  j["dtype"] = "float32";
  j["endianness"] = "little";
  j["step"] = model.step;
  j["generator_optimizer_steps"] = model.generator_opt.steps();
  j["critic_optimizer_steps"] = model.critic_opt.steps();
  j["config"] = to_json(model.config);
  j["config_hash"] = gan_config_hash(model.config);
  j["generator"] = spec_json(model.generator.spec());
  j["critic"] = spec_json(model.critic.spec());
  json list = json::array();
  for (const auto* p : tensors) {
    list.push_back({{"name", p->name}, {"shape", p->shape}, {"file", p->name + ".bin"},
                    {"trainable", p->trainable}});
  }
  j["tensors"] = list;
  std::ofstream out(dir / "model.json");
  if (!out) fail(ErrorCode::io_error, "cannot write " + (dir / "model.json").string());
  out << j.dump(2) << '\n';
}

std::unique_ptr<GanModel> load_checkpoint(const fs::path& dir) {
  const fs::path meta = dir / "model.json";
  std::ifstream in(meta);
  if (!in) fail(ErrorCode::missing_sample, "checkpoint not found: " + meta.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, meta.string() + ": " + e.what());
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    fail(ErrorCode::unknown_version, meta.string() + ": unsupported checkpoint version");
  }
  auto model = std::make_unique<GanModel>(from_json(j.at("config")));
  if (j.at("config_hash").get<std::string>() != gan_config_hash(model->config)) {
    fail(ErrorCode::parse_error, meta.string() + ": config hash does not match its config");
  }
  const auto tensors = model->all_tensors();
  std::set<std::string> listed;
  for (const auto& t : j.at("tensors")) listed.insert(t.at("name").get<std::string>());
  for (const auto* p : tensors) {
    if (!listed.count(p->name)) {
      fail(ErrorCode::shape_mismatch, meta.string() + ": tensor '" + p->name + "' not listed");
    }
  }
  nn::load_params(dir, tensors);
  model->step = j.at("step").get<std::int64_t>();
  model->generator_opt.set_steps(j.at("generator_optimizer_steps").get<std::int64_t>());
  model->critic_opt.set_steps(j.at("critic_optimizer_steps").get<std::int64_t>());
  return model;
}

template <typename T>
nn::Tensor<T> latent_batch(int n, int latent_dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  nn::Tensor<T> z(n, latent_dim);
  for (auto& v : z.data) v = static_cast<T>(normal(rng));
  return z;
}

template nn::Tensor<float> latent_batch<float>(int, int, std::mt19937_64&);
template nn::Tensor<double> latent_batch<double>(int, int, std::mt19937_64&);

std::vector<RadarImage> sample_conditional(GanModel& model, const std::vector<ClassLabel>& labels,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int S = model.config.image_size;
  const int chunk = std::max(1, model.config.batch_size);
  std::vector<RadarImage> out;
  out.reserve(labels.size());
  for (std::size_t start = 0; start < labels.size(); start += chunk) {
    const int n = static_cast<int>(std::min<std::size_t>(chunk, labels.size() - start));
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = class_id(labels[start + i]);
    const auto z = latent_batch<float>(n, model.config.latent_dim, rng);
    const auto images = model.generator.forward(z, ids, false);
    for (int i = 0; i < n; ++i) {
      RadarImage img;
      img.domain = DomainTag::time;
      img.pixels = Eigen::Map<const ImageRM>(images.sample(i), S, S);
      out.push_back(std::move(img));
    }
  }
  return out;
}

}  // namespace gprlab::gan
