#include "gprlab/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gprlab/core/error.hpp"
#include "gprlab/core/hash.hpp"

extern char** environ;

namespace gprlab::app {

using nlohmann::json;

namespace {

constexpr std::string_view kEnvPrefix = "GPRLAB_";

json range_json(const sim::Range& r) { return json::array({r.lo, r.hi}); }

sim::Range range_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) {
    fail(ErrorCode::config_error, "simulation.ranges." + key + " must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const RunConfig& c) {
  const auto& base = c.simulation.ranges.base;
  const auto& r = c.simulation.ranges;
  json materials = json::array();
  for (auto m : r.materials) materials.push_back(std::string(class_name(m)));
  json kinds = json::array();
  for (auto k : c.experiment.kinds) kinds.push_back(std::string(clf::to_string(k)));
  return json{
      {"output_dir", c.output_dir.string()},
      {"seed", c.seed},
      {"simulation",
       {{"engine", c.simulation.engine},
        {"canvas", c.simulation.canvas},
        {"count", c.simulation.count},
        {"threads", c.simulation.threads},
        {"scene",
         {{"domain_width", base.domain_width},
          {"domain_depth", base.domain_depth},
          {"cell_size", base.cell_size},
          {"time_window", base.time_window},
          {"center_frequency", base.waveform.center_frequency},
          {"amplitude", base.waveform.amplitude},
          {"soil_conductivity", base.soil.conductivity},
          {"num_traces", base.traversal.num_traces},
          {"trace_step", base.traversal.step},
          {"tx_start", base.traversal.tx_start},
          {"rx_start", base.traversal.rx_start},
          {"antenna_depth", base.traversal.antenna_depth},
          {"direct_wave", base.direct_wave}}},
        {"ranges",
         {{"materials", materials},
          {"radius", range_json(r.radius)},
          {"center_depth", range_json(r.center_depth)},
          {"center_x", range_json(r.center_x)},
          {"soil_permittivity", range_json(r.soil_permittivity)},
          {"heterogeneity", range_json(r.heterogeneity)},
          {"correlation_length", range_json(r.correlation_length)}}}}},
      {"preprocess",
       {{"dewow", c.preprocess.dewow},
        {"background_removal", c.preprocess.background_removal},
        {"gain", c.preprocess.gain}}},
      {"frequency",
       {{"nfft", c.frequency.nfft},
        {"segment_length", c.frequency.segment_length},
        {"hop", c.frequency.hop},
        {"reduction", std::string(freq::to_string(c.frequency.reduction))}}},
      {"gan", json::parse(gan::gan_config_to_json(c.gan))},
      {"classifier", json::parse(clf::classifier_config_to_json(c.classifier))},
      {"experiment",
       {{"seeds", c.experiment.seeds},
        {"kinds", kinds},
        {"samples_per_class", c.experiment.samples_per_class},
        {"test_fraction", c.experiment.test_fraction},
        {"train_count", c.experiment.train_count}}}};
}

/// Every key of `doc` must exist in `schema`; objects are checked recursively.
void check_keys(const json& doc, const json& schema, const std::string& path) {
  if (!doc.is_object()) {
    fail(ErrorCode::config_error,
         "config: " + (path.empty() ? std::string("document") : path) + " must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) fail(ErrorCode::config_error, "config: unknown key '" + full + "'");
    if (schema.at(key).is_object()) check_keys(value, schema.at(key), full);
  }
}

void merge(json& target, const json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && target.contains(key) && target[key].is_object()) {
      merge(target[key], value);
    } else {
      target[key] = value;
    }
  }
}

void apply_env(json& doc, const json& schema, const Environment& env) {
  for (const auto& [name, raw] : env) {
    if (name.rfind(kEnvPrefix, 0) != 0) continue;
    std::string rest = name.substr(kEnvPrefix.size());
    std::transform(rest.begin(), rest.end(), rest.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    std::vector<std::string> parts;
    for (std::size_t pos = 0;;) {
      const std::size_t next = rest.find("__", pos);
      parts.push_back(rest.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    const json* s = &schema;
    json* d = &doc;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!s->is_object() || !s->contains(parts[i])) {
        fail(ErrorCode::config_error, "environment override " + name + " names no config key");
      }
      s = &s->at(parts[i]);
      if (i + 1 < parts.size()) {
        if (!d->contains(parts[i]) || !(*d)[parts[i]].is_object()) (*d)[parts[i]] = json::object();
        d = &(*d)[parts[i]];
      }
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    (*d)[parts.back()] = value;
  }
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.output_dir = j.at("output_dir").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();

  const json& s = j.at("simulation");
  c.simulation.engine = s.at("engine").get<std::string>();
  c.simulation.canvas = s.at("canvas").get<int>();
  c.simulation.count = s.at("count").get<int>();
  c.simulation.threads = s.at("threads").get<int>();
  auto& base = c.simulation.ranges.base;
  const json& sc = s.at("scene");
  base.domain_width = sc.at("domain_width").get<double>();
  base.domain_depth = sc.at("domain_depth").get<double>();
  base.cell_size = sc.at("cell_size").get<double>();
  base.time_window = sc.at("time_window").get<double>();
  base.waveform.center_frequency = sc.at("center_frequency").get<double>();
  base.waveform.amplitude = sc.at("amplitude").get<double>();
  base.soil.conductivity = sc.at("soil_conductivity").get<double>();
  base.traversal.num_traces = sc.at("num_traces").get<int>();
  base.traversal.step = sc.at("trace_step").get<double>();
  base.traversal.tx_start = sc.at("tx_start").get<double>();
  base.traversal.rx_start = sc.at("rx_start").get<double>();
  base.traversal.antenna_depth = sc.at("antenna_depth").get<double>();
  base.direct_wave = sc.at("direct_wave").get<bool>();
  const json& r = s.at("ranges");
  auto& ranges = c.simulation.ranges;
  ranges.materials.clear();
  for (const auto& m : r.at("materials")) ranges.materials.push_back(class_from_name(m.get<std::string>()));
  ranges.radius = range_from(r.at("radius"), "radius");
  ranges.center_depth = range_from(r.at("center_depth"), "center_depth");
  ranges.center_x = range_from(r.at("center_x"), "center_x");
  ranges.soil_permittivity = range_from(r.at("soil_permittivity"), "soil_permittivity");
  ranges.heterogeneity = range_from(r.at("heterogeneity"), "heterogeneity");
  ranges.correlation_length = range_from(r.at("correlation_length"), "correlation_length");

  const json& p = j.at("preprocess");
  c.preprocess.dewow = p.at("dewow").get<bool>();
  c.preprocess.background_removal = p.at("background_removal").get<bool>();
  c.preprocess.gain = p.at("gain").get<double>();

  const json& f = j.at("frequency");
  c.frequency.nfft = f.at("nfft").get<int>();
  c.frequency.segment_length = f.at("segment_length").get<int>();
  c.frequency.hop = f.at("hop").get<int>();
  c.frequency.reduction = freq::reduction_from_string(f.at("reduction").get<std::string>());

  c.gan = gan::gan_config_from_json(j.at("gan").dump());
  c.classifier = clf::classifier_config_from_json(j.at("classifier").dump());

  const json& e = j.at("experiment");
  c.experiment.seeds = e.at("seeds").get<std::vector<std::uint64_t>>();
  c.experiment.kinds.clear();
  for (const auto& k : e.at("kinds")) {
    c.experiment.kinds.push_back(clf::classifier_kind_from_string(k.get<std::string>()));
  }
  c.experiment.samples_per_class = e.at("samples_per_class").get<int>();
  c.experiment.test_fraction = e.at("test_fraction").get<double>();
  c.experiment.train_count = e.at("train_count").get<int>();
  return c;
}

}  // namespace

std::vector<std::uint64_t> RunConfig::experiment_seeds() const {
  if (!experiment.seeds.empty()) return experiment.seeds;
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < 5; ++i) out.push_back(seed + i);
  return out;
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::config_error, "config: " + msg);
  };
  check(!output_dir.empty(), "output_dir must not be empty");
  check(simulation.engine == "analytic" || simulation.engine == "fdtd",
        "simulation.engine must be analytic or fdtd");
  check(simulation.canvas >= 8, "simulation.canvas must be >= 8");
  check(simulation.count >= 0, "simulation.count must be >= 0");
  check(simulation.threads >= 1, "simulation.threads must be >= 1");
  check(!simulation.ranges.materials.empty(), "simulation.ranges.materials must not be empty");
  check(preprocess.gain >= 0, "preprocess.gain must be >= 0");
  check(gan.image_size == simulation.canvas, "gan.image_size must equal simulation.canvas");
  check(!experiment.kinds.empty(), "experiment.kinds must not be empty");
  check(experiment.samples_per_class >= 0, "experiment.samples_per_class must be >= 0");
  check(experiment.test_fraction > 0 && experiment.test_fraction < 1,
        "experiment.test_fraction must lie in (0, 1)");
  check(experiment.train_count >= 0, "experiment.train_count must be >= 0");
  try {
    frequency.validate();
    gan.validate();
    classifier.validate();
  } catch (const Error& e) {
    fail(ErrorCode::config_error, e.what());
  }
}

std::string run_config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

RunConfig run_config_from_json(const std::string& text, const Environment& env) {
  const json schema = to_json(RunConfig{});
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config_error, std::string("config: ") + e.what());
  }
  check_keys(doc, schema, "");
  apply_env(doc, schema, env);
  check_keys(doc, schema, "");

  json merged = schema;
  merge(merged, doc);
  const auto seed = merged.at("seed");
  if (!doc.contains("gan") || !doc["gan"].contains("seed")) merged["gan"]["seed"] = seed;
  if (!doc.contains("classifier") || !doc["classifier"].contains("seed")) {
    merged["classifier"]["seed"] = seed;
  }
  RunConfig cfg;
  try {
    cfg = from_json(merged);
  } catch (const json::exception& e) {
    fail(ErrorCode::config_error, std::string("config: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::config_error, e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const Environment& env) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config_error, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str(), env);
}

std::string run_config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

Environment process_environment() {
  Environment env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(0, eq);
    if (name.rfind(kEnvPrefix, 0) == 0) env[name] = entry.substr(eq + 1);
  }
  return env;
}

}  // namespace gprlab::app
