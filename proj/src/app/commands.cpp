#include "gprlab/app/commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gprlab/clf/train.hpp"
#include "gprlab/core/dataset.hpp"
#include "gprlab/core/hash.hpp"
#include "gprlab/eval/experiment.hpp"
#include "gprlab/freq/frequency_bscan.hpp"
#include "gprlab/gan/trainer.hpp"
#include "gprlab/sim/analytic.hpp"
#include "gprlab/sim/fdtd.hpp"
#include "gprlab/sim/gprmax.hpp"
#include "gprlab/sim/random_field.hpp"
#include "gprlab/sim/sampling.hpp"

namespace gprlab::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "run_manifest.json";
constexpr std::uint64_t kTestSplitSalt = 0x7465737473706c74;
constexpr std::uint64_t kTrainCapSalt = 0x747261696e636170;
constexpr std::uint64_t kValSplitSalt = 0x76616c73706c6974;
constexpr std::uint64_t kSampleSalt = 0x73616d706c65;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ostream& log_of(const CommandContext& ctx) {
  static std::ostringstream sink;
  return ctx.log ? *ctx.log : sink;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::io_error, "failed writing " + path.string());
}

struct StageSpec {
  std::string name;
  json args;
  std::vector<std::string> outputs;  // relative to the run directory
  bool allow_existing = false;
};

StageOutcome run_stage(const CommandContext& ctx, const StageSpec& spec,
                       const std::function<json()>& body) {
  const fs::path dir = ctx.run_dir();
  const fs::path manifest_path = dir / kManifestName;
  json manifest = fs::exists(manifest_path) ? read_json_file(manifest_path) : json::object();
  if (manifest.contains("config_hash") && manifest["config_hash"] != ctx.config_hash && !ctx.force) {
    fail(ErrorCode::config_error,
         "run directory " + dir.string() + " belongs to config " +
             manifest["config_hash"].get<std::string>() + " but this config hashes to " +
             ctx.config_hash + "; use --force or another output_dir");
  }
  const std::string stage_hash =
      sha256_hex(ctx.config_hash + "\n" + spec.name + "\n" + spec.args.dump());
  bool all_exist = true;
  for (const auto& o : spec.outputs) all_exist = all_exist && fs::exists(dir / o);
  const bool recorded = manifest.contains("stages") && manifest["stages"].contains(spec.name) &&
                        manifest["stages"][spec.name].value("stage_hash", "") == stage_hash;
  if (!ctx.force && !spec.allow_existing) {
    if (recorded && all_exist) {
      log_of(ctx) << spec.name << ": up to date (" << stage_hash.substr(0, 12) << ")\n";
      return StageOutcome::up_to_date;
    }
    for (const auto& o : spec.outputs) {
      if (fs::exists(dir / o)) {
        fail(ErrorCode::config_error,
             (dir / o).string() + " already exists from different inputs; use --force to replace it");
      }
    }
  }
  if (ctx.force && !spec.allow_existing) {
    for (const auto& o : spec.outputs) fs::remove_all(dir / o);
  }
  fs::create_directories(dir);
  const std::string started = utc_now();
  const json seeds = body();
  const std::string finished = utc_now();

  if (!manifest.contains("created_at")) manifest["created_at"] = started;
  manifest["tool"] = "gprlab";
  manifest["tool_version"] = GPRLAB_VERSION;
  manifest["config_hash"] = ctx.config_hash;
  manifest["seed"] = ctx.config.seed;
  manifest["config"] = json::parse(run_config_to_json(ctx.config));
  manifest["updated_at"] = finished;
  json artifacts = json::array();
  for (const auto& o : spec.outputs) {
    if (fs::exists(dir / o)) artifacts.push_back(o);
  }
  manifest["stages"][spec.name] = {{"stage_hash", stage_hash}, {"args", spec.args},
                                   {"artifacts", artifacts},   {"seeds", seeds},
                                   {"started_at", started},    {"finished_at", finished}};
  const fs::path tmp = dir / (std::string(kManifestName) + ".tmp");
  write_text(tmp, manifest.dump(2) + "\n");
  fs::rename(tmp, manifest_path);
  log_of(ctx) << spec.name << ": wrote";
  for (const auto& a : artifacts) log_of(ctx) << ' ' << (dir / a.get<std::string>()).string();
  log_of(ctx) << '\n';
  return StageOutcome::ran;
}

std::pair<std::vector<LabeledImage>, std::vector<std::string>> load_images(const fs::path& dir) {
  auto [items, manifest] = load_dataset(dir);
  std::vector<std::string> ids;
  for (const auto& m : manifest.items) ids.push_back(m.sample_path);
  return {std::move(items), std::move(ids)};
}

fs::path default_real_input(const CommandContext& ctx) {
  const fs::path pre = ctx.run_dir() / "preprocessed";
  return fs::exists(pre / "manifest.json") ? pre : ctx.run_dir() / "simulated";
}

std::vector<int> labels_of(const std::vector<LabeledImage>& items, const char* what) {
  std::vector<int> out;
  for (const auto& item : items) {
    require(item.label.has_value(), ErrorCode::invalid_argument,
            std::string(what) + ": every image needs a label");
    out.push_back(class_id(*item.label));
  }
  return out;
}

struct RealSplit {
  std::vector<std::size_t> train, test;
};

RealSplit split_real(const std::vector<LabeledImage>& items, const RunConfig& cfg) {
  const std::vector<int> labels = labels_of(items, "real dataset");
  const auto s = eval::stratified_split(labels, cfg.experiment.test_fraction, cfg.seed ^ kTestSplitSalt);
  RealSplit out{s.rest, s.picked};
  const auto cap = static_cast<std::size_t>(cfg.experiment.train_count);
  if (cap > 0 && cap < out.train.size()) {
    std::vector<int> sub;
    for (auto i : out.train) sub.push_back(labels[i]);
    const double fraction = static_cast<double>(cap) / static_cast<double>(out.train.size());
    const auto capped = eval::stratified_split(sub, fraction, cfg.seed ^ kTrainCapSalt);
    std::vector<std::size_t> kept;
    for (auto k : capped.picked) kept.push_back(out.train[k]);
    out.train = std::move(kept);
  }
  require(!out.train.empty() && !out.test.empty(), ErrorCode::invalid_argument,
          "real dataset too small for a train/test split");
  return out;
}

std::vector<clf::ClassifierSample> classifier_samples(const std::vector<LabeledImage>& items,
                                                      const std::vector<std::size_t>& idx,
                                                      bool with_frequency,
                                                      const freq::SpectrogramConfig& fcfg) {
  std::vector<clf::ClassifierSample> out;
  for (auto i : idx) {
    clf::ClassifierSample s;
    s.time = items[i].image;
    s.label = class_id(*items[i].label);
    if (with_frequency) s.frequency = freq::frequency_bscan(items[i].image, fcfg).image;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

json scene_json(const sim::SimulationScene& s) {
  return {{"seed", s.seed},
          {"material", std::string(class_name(s.cylinder.material))},
          {"radius", s.cylinder.radius},
          {"center_x", s.cylinder.center_x},
          {"center_depth", s.cylinder.center_depth},
          {"soil_permittivity", s.soil.mean_rel_permittivity},
          {"heterogeneity", s.soil.heterogeneity},
          {"correlation_length", s.soil.correlation_length}};
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::parse_error:
    case ErrorCode::invalid_argument:
    case ErrorCode::infeasible:
    case ErrorCode::courant_violation:
    case ErrorCode::unknown_version:
      return kExitConfig;
    case ErrorCode::numerical_abort:
    case ErrorCode::non_finite:
      return kExitNumerical;
    case ErrorCode::leakage:
      return kExitLeakage;
    default:
      return kExitFailure;
  }
}

CommandContext make_context(RunConfig config, bool force, std::ostream* log) {
  config.validate();
  CommandContext ctx;
  ctx.config_hash = run_config_hash(config);
  ctx.config = std::move(config);
  ctx.force = force;
  ctx.log = log;
  return ctx;
}

StageOutcome cmd_simulate(const CommandContext& ctx, std::optional<int> n_opt,
                          std::optional<std::string> engine_opt, bool emit_gprmax) {
  const RunConfig& cfg = ctx.config;
  const int n = n_opt.value_or(cfg.simulation.count);
  const std::string engine = engine_opt.value_or(cfg.simulation.engine);
  require(n >= 0, ErrorCode::config_error, "simulate: count must be >= 0");
  require(engine == "analytic" || engine == "fdtd", ErrorCode::config_error,
          "simulate: engine must be analytic or fdtd");
  sim::check_feasible(cfg.simulation.ranges);

  StageSpec spec{"simulate", {{"count", n}, {"engine", engine}, {"emit_gprmax", emit_gprmax}}, {"simulated"}};
  if (emit_gprmax) spec.outputs.push_back("gprmax");
  return run_stage(ctx, spec, [&] {
    const auto scenes = sim::sample_scenes(cfg.simulation.ranges, n, cfg.seed);
    std::vector<LabeledImage> items(scenes.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next++;
        if (i >= scenes.size()) return;
        try {
          std::pair<BScan, ClassLabel> r;
          if (engine == "fdtd") {
            sim::FdtdOptions opts;
            opts.threads = 1;
            r = sim::fdtd_bscan(scenes[i], opts);
          } else {
            r = sim::analytic_bscan(scenes[i]);
          }
          items[i].image = resize_to_canvas(r.first, cfg.simulation.canvas);
          items[i].label = r.second;
          items[i].scene_seed = scenes[i].seed;
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = scenes.size();
        }
      }
    };
    const int threads = std::max(1, std::min<int>(cfg.simulation.threads, static_cast<int>(scenes.size())));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    const fs::path out = ctx.run_dir() / "simulated";
    save_dataset(items, out);
    json list = json::array();
    for (const auto& s : scenes) list.push_back(scene_json(s));
    write_text(out / "scenes.json", list.dump(2) + "\n");
    if (emit_gprmax) {
      const fs::path gdir = ctx.run_dir() / "gprmax";
      fs::create_directories(gdir);
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "scene_%05zu.in", i);
        write_text(gdir / name, sim::emit_gprmax_config(scenes[i]));
      }
    }
    std::map<std::string, int> histogram;
    for (const auto& item : items) ++histogram[std::string(class_name(*item.label))];
    log_of(ctx) << "simulate: " << items.size() << " scenes (";
    bool first = true;
    for (const auto& [k, v] : histogram) {
      log_of(ctx) << (first ? "" : ", ") << k << ' ' << v;
      first = false;
    }
    log_of(ctx) << ")\n";
    return json{{"scene_seed_first", cfg.seed}, {"scene_count", n}};
  });
}

StageOutcome cmd_preprocess(const CommandContext& ctx, std::optional<fs::path> input) {
  const RunConfig& cfg = ctx.config;
  const fs::path in = input.value_or(ctx.run_dir() / "simulated");
  StageSpec spec{"preprocess", {{"input", in.string()}}, {"preprocessed"}};
  return run_stage(ctx, spec, [&] {
    auto [items, ids] = load_images(in);
    const auto& base = cfg.simulation.ranges.base;
    for (auto& item : items) {
      require(item.image.domain == DomainTag::time, ErrorCode::invalid_argument,
              "preprocess: input images must be time-domain");
      BScan b;
      b.traces = item.image.pixels.cast<double>().transpose();
      b.dt = base.time_window / item.image.rows();
      b.trace_spacing = base.traversal.step;
      const BScan p = preprocess_bscan(b, cfg.preprocess);
      MatrixRM m = p.traces.transpose();
      rescale_symmetric(m);
      item.image.pixels = m.cast<float>();
    }
    save_dataset(items, ctx.run_dir() / "preprocessed");
    return json::object();
  });
}

StageOutcome cmd_transform(const CommandContext& ctx, std::optional<fs::path> input) {
  const RunConfig& cfg = ctx.config;
  const fs::path in = input.value_or(default_real_input(ctx));
  StageSpec spec{"transform", {{"input", in.string()}}, {"frequency"}};
  return run_stage(ctx, spec, [&] {
    auto [items, ids] = load_images(in);
    for (auto& item : items) item.image = freq::frequency_bscan(item.image, cfg.frequency).image;
    save_dataset(items, ctx.run_dir() / "frequency");
    return json::object();
  });
}

StageOutcome cmd_train_gan(const CommandContext& ctx, std::optional<fs::path> input, bool resume) {
  const RunConfig& cfg = ctx.config;
  const fs::path in = input.value_or(default_real_input(ctx));
  const fs::path gdir = ctx.run_dir() / "gan";
  StageSpec spec{"train-gan", {{"input", in.string()}, {"resume", resume}}, {"gan"}};
  spec.allow_existing = resume;
  return run_stage(ctx, spec, [&] {
    auto [items, ids] = load_images(in);
    labels_of(items, "train-gan");
    std::unique_ptr<gan::GanModel> model;
    if (resume) {
      model = gan::load_checkpoint(gdir / "last");
      gan::GanConfig want = cfg.gan;
      want.max_steps = model->config.max_steps;
      require(want == model->config, ErrorCode::config_error,
              "train-gan --resume: checkpoint config differs from the run config beyond max_steps");
      model->config.max_steps = cfg.gan.max_steps;
      log_of(ctx) << "train-gan: resuming at step " << model->step << '\n';
    } else {
      model = std::make_unique<gan::GanModel>(cfg.gan);
    }
    fs::create_directories(gdir);
    gan::TrainOptions opts;
    opts.best_checkpoint_dir = gdir / "best";
    opts.last_checkpoint_dir = gdir / "last";
    const std::int64_t start = model->step;
    const auto result = gan::train_wgan_gp(*model, items, opts);
    const fs::path log_path = gdir / "train_log.csv";
    if (resume && fs::exists(log_path)) {
      const fs::path tmp = gdir / "train_log.resume.csv";
      gan::write_training_log(tmp, result.log);
      std::ifstream extra(tmp);
      std::string line;
      std::getline(extra, line);  // header
      std::ofstream out(log_path, std::ios::app);
      while (std::getline(extra, line)) out << line << '\n';
      extra.close();
      fs::remove(tmp);
    } else {
      gan::write_training_log(log_path, result.log);
    }
    log_of(ctx) << "train-gan: steps " << start << " -> " << model->step
                << (result.early_stopped ? " (early stop)" : "") << ", best step "
                << result.best_step << '\n';
    return json{{"gan_seed", cfg.gan.seed}};
  });
}

StageOutcome cmd_sample(const CommandContext& ctx, std::optional<fs::path> checkpoint,
                        std::optional<int> per_class_opt) {
  const RunConfig& cfg = ctx.config;
  fs::path ckpt = checkpoint.value_or(ctx.run_dir() / "gan" / "best");
  if (!checkpoint && !fs::exists(ckpt / "model.json")) ckpt = ctx.run_dir() / "gan" / "last";
  const int per_class = per_class_opt.value_or(cfg.experiment.samples_per_class);
  require(per_class >= 0, ErrorCode::config_error, "sample: per-class count must be >= 0");
  StageSpec spec{"sample", {{"checkpoint", ckpt.string()}, {"per_class", per_class}}, {"generated"}};
  return run_stage(ctx, spec, [&] {
    auto model = gan::load_checkpoint(ckpt);
    std::vector<ClassLabel> labels;
    for (int c = 0; c < kNumClasses; ++c)
      for (int k = 0; k < per_class; ++k) labels.push_back(class_from_id(c));
    const std::uint64_t seed = sim::splitmix64(cfg.seed ^ kSampleSalt);
    const auto images = gan::sample_conditional(*model, labels, seed);
    std::vector<LabeledImage> items;
    for (std::size_t i = 0; i < images.size(); ++i) items.push_back({images[i], labels[i], std::nullopt});
    save_dataset(items, ctx.run_dir() / "generated");
    return json{{"sample_seed", seed}};
  });
}

StageOutcome cmd_train_clf(const CommandContext& ctx, const std::string& kind_name,
                           std::optional<fs::path> input, bool augment) {
  const RunConfig& cfg = ctx.config;
  const clf::ClassifierKind kind = clf::classifier_kind_from_string(kind_name);
  const fs::path in = input.value_or(default_real_input(ctx));
  const fs::path gen = ctx.run_dir() / "generated";
  const std::string out_name = "classifier_" + kind_name;
  StageSpec spec{"train-clf:" + kind_name,
                 {{"input", in.string()}, {"kind", kind_name}, {"augment", augment}},
                 {out_name}};
  return run_stage(ctx, spec, [&] {
    auto [items, ids] = load_images(in);
    const RealSplit split = split_real(items, cfg);
    const bool with_freq = kind != clf::ClassifierKind::time;
    auto pool = classifier_samples(items, split.train, with_freq, cfg.frequency);
    const auto test = classifier_samples(items, split.test, with_freq, cfg.frequency);
    std::vector<int> pool_labels;
    for (const auto& s : pool) pool_labels.push_back(s.label);
    const auto vs = eval::stratified_split(pool_labels, cfg.classifier.validation_fraction,
                                           cfg.classifier.seed ^ kValSplitSalt);
    std::vector<clf::ClassifierSample> train, val;
    for (auto i : vs.rest) train.push_back(pool[i]);
    for (auto i : vs.picked) val.push_back(pool[i]);
    if (augment) {
      auto [gitems, gids] = load_images(gen);
      labels_of(gitems, "generated dataset");
      auto extra = classifier_samples(gitems, all_indices(gitems.size()), with_freq, cfg.frequency);
      train.insert(train.end(), extra.begin(), extra.end());
    }
    clf::ClassifierSpec cspec;
    cspec.image_size = items.front().image.rows();
    const auto result = clf::train_classifier(train, val, kind, cspec, cfg.classifier);
    const fs::path out = ctx.run_dir() / out_name;
    clf::save_classifier(*result.model, out / "model");
    clf::write_classifier_log(out / "train_log.csv", result.log);
    const auto probs = result.model->predict_proba(test);
    std::vector<std::string> test_ids;
    std::vector<int> truths, preds = result.model->predict(test);
    for (std::size_t k = 0; k < split.test.size(); ++k) {
      test_ids.push_back(ids[split.test[k]]);
      truths.push_back(test[k].label);
    }
    clf::write_predictions_csv(out / "predictions.csv", test_ids, probs);
    const auto rep = eval::report(eval::confusion_matrix(preds, truths));
    write_text(out / "report.json", eval::report_to_json(rep) + "\n");
    write_text(out / "report.txt", eval::report_to_text(rep));
    log_of(ctx) << "train-clf: " << kind_name << " best epoch " << result.best_epoch
                << ", test accuracy " << rep.all.accuracy << '\n';
    return json{{"classifier_seed", cfg.classifier.seed}};
  });
}

StageOutcome cmd_evaluate(const CommandContext& ctx, std::optional<fs::path> input,
                          std::optional<fs::path> generated, bool augment) {
  const RunConfig& cfg = ctx.config;
  const fs::path in = input.value_or(default_real_input(ctx));
  const fs::path gen = generated.value_or(ctx.run_dir() / "generated");
  StageSpec spec{"evaluate",
                 {{"input", in.string()}, {"generated", augment ? gen.string() : ""}},
                 {"evaluation"}};
  return run_stage(ctx, spec, [&] {
    auto [items, ids] = load_images(in);
    const RealSplit split = split_real(items, cfg);
    eval::ExperimentPlan plan;
    for (auto i : split.train) plan.real_train.push_back(items[i]);
    for (auto i : split.test) plan.test.push_back(items[i]);
    if (augment) plan.augmentation = load_images(gen).first;
    plan.kinds = cfg.experiment.kinds;
    plan.seeds = cfg.experiment_seeds();
    plan.train_config = cfg.classifier;
    plan.freq_config = cfg.frequency;
    const auto result = eval::run_augmentation_experiment(plan);
    const fs::path out = ctx.run_dir() / "evaluation";
    fs::create_directories(out);
    write_text(out / "experiment.json", eval::experiment_to_json(result) + "\n");
    write_text(out / "report.txt", eval::experiment_to_text(result));
    eval::write_chart_csv(out / "chart.csv", result.chart);
    json summary = json::object();
    for (const auto kind : plan.kinds) {
      summary[std::string(clf::to_string(kind))] = {
          {"median_macro_f1_before", eval::median_macro_f1(result, kind, false)},
          {"median_macro_f1_after", eval::median_macro_f1(result, kind, true)}};
    }
    write_text(out / "summary.json", summary.dump(2) + "\n");
    return json{{"experiment_seeds", plan.seeds}};
  });
}

StageOutcome cmd_report(const CommandContext& ctx) {
  const fs::path eval_dir = ctx.run_dir() / "evaluation";
  StageSpec spec{"report", json::object(), {"report"}};
  return run_stage(ctx, spec, [&] {
    const json summary = read_json_file(eval_dir / "summary.json");
    std::ifstream tin(eval_dir / "report.txt");
    std::stringstream tables;
    tables << tin.rdbuf();
    std::ostringstream text;
    text << "Scenario    macro-F1 before  macro-F1 after  delta\n";
    for (const auto& [name, v] : summary.items()) {
      const double b = v.at("median_macro_f1_before").get<double>();
      const double a = v.at("median_macro_f1_after").get<double>();
      char line[96];
      std::snprintf(line, sizeof line, "%-11s %15.3f %15.3f %+6.3f\n", name.c_str(), b, a, a - b);
      text << line;
    }
    text << "\n" << tables.str();
    const fs::path out = ctx.run_dir() / "report";
    fs::create_directories(out);
    write_text(out / "summary.txt", text.str());
    log_of(ctx) << text.str();
    return json::object();
  });
}

int run_cli(const std::vector<std::string>& args, const Environment& env, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"gprlab: synthetic GPR B-scans, WGAN-GP augmentation and classifier evaluation"};
  app.set_version_flag("--version", GPRLAB_VERSION);
  std::string config_path, output_dir;
  bool force = false;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_option("-o,--output-dir", output_dir, "Run directory (overrides output_dir)");
  app.add_flag("--force", force, "Replace existing stage outputs");
  app.require_subcommand(1);

  int count = 0;
  std::string engine, input, generated, checkpoint, kind = "time";
  bool emit_gprmax = false, resume = false, augment = false, no_augment = false;
  int per_class = 0;

  auto* sim = app.add_subcommand("simulate", "Synthesize labeled time-domain B-scans");
  auto* count_opt = sim->add_option("-n,--count", count, "Number of scenes");
  auto* engine_opt = sim->add_option("--engine", engine, "analytic or fdtd")
                         ->check(CLI::IsMember({"analytic", "fdtd"}));
  sim->add_flag("--emit-gprmax", emit_gprmax, "Also write one gprMax input file per scene");

  auto* pre = app.add_subcommand("preprocess", "Dewow, background removal and time gain");
  auto* pre_in = pre->add_option("-i,--input", input, "Input dataset directory");

  auto* tr = app.add_subcommand("transform", "Frequency B-scans from time images");
  auto* tr_in = tr->add_option("-i,--input", input, "Input dataset directory");

  auto* tg = app.add_subcommand("train-gan", "Train the conditional WGAN-GP");
  auto* tg_in = tg->add_option("-i,--input", input, "Input dataset directory");
  tg->add_flag("--resume", resume, "Continue from the last checkpoint");

  auto* sa = app.add_subcommand("sample", "Export generated labeled images");
  auto* sa_ck = sa->add_option("--checkpoint", checkpoint, "GAN checkpoint directory");
  auto* sa_pc = sa->add_option("--per-class", per_class, "Images per class");

  auto* tc = app.add_subcommand("train-clf", "Train one classifier and score the test split");
  tc->add_option("--kind", kind, "time, frequency or combined")
      ->check(CLI::IsMember({"time", "frequency", "combined"}));
  auto* tc_in = tc->add_option("-i,--input", input, "Input dataset directory");
  tc->add_flag("--augment", augment, "Add the generated dataset to the training split");

  auto* ev = app.add_subcommand("evaluate", "Before/after augmentation experiment");
  auto* ev_in = ev->add_option("-i,--input", input, "Real dataset directory");
  auto* ev_gen = ev->add_option("--generated", generated, "Generated dataset directory");
  ev->add_flag("--no-augment", no_augment, "Run with zero augmentation samples");

  auto* rep = app.add_subcommand("report", "Summarize the evaluation");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitConfig;
  }

  auto opt_path = [](CLI::Option* o, const std::string& v) {
    return o->count() ? std::optional<fs::path>(v) : std::nullopt;
  };
  try {
    RunConfig cfg = config_path.empty() ? run_config_from_json("", env) : load_run_config(config_path, env);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    const CommandContext ctx = make_context(std::move(cfg), force, &out);
    if (sim->parsed()) {
      cmd_simulate(ctx, count_opt->count() ? std::optional<int>(count) : std::nullopt,
                   engine_opt->count() ? std::optional<std::string>(engine) : std::nullopt, emit_gprmax);
    } else if (pre->parsed()) {
      cmd_preprocess(ctx, opt_path(pre_in, input));
    } else if (tr->parsed()) {
      cmd_transform(ctx, opt_path(tr_in, input));
    } else if (tg->parsed()) {
      cmd_train_gan(ctx, opt_path(tg_in, input), resume);
    } else if (sa->parsed()) {
      cmd_sample(ctx, opt_path(sa_ck, checkpoint),
                 sa_pc->count() ? std::optional<int>(per_class) : std::nullopt);
    } else if (tc->parsed()) {
      cmd_train_clf(ctx, kind, opt_path(tc_in, input), augment);
    } else if (ev->parsed()) {
      cmd_evaluate(ctx, opt_path(ev_in, input), opt_path(ev_gen, generated), !no_augment);
    } else if (rep->parsed()) {
      cmd_report(ctx);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitSuccess;
}

}  // namespace gprlab::app
