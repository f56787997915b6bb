#include "gprlab/sim/gprmax.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "gprlab/core/error.hpp"

namespace gprlab::sim {

namespace {

constexpr std::string_view kMetaPrefix = "gprlab ";

std::string shortest(double v, std::chars_format fmt) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, fmt);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(ErrorCode::parse_error, "gprMax config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& tok, int line) {
  double v = 0;
  const char* end = tok.data() + tok.size();
  auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) parse_fail(line, "expected a number, got '" + tok + "'");
  return v;
}

long long to_int(const std::string& tok, int line) {
  long long v = 0;
  const char* end = tok.data() + tok.size();
  auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) parse_fail(line, "expected an integer, got '" + tok + "'");
  return v;
}

std::string material_id(ClassLabel m) {
  return m == ClassLabel::metallic ? "pec" : std::string(class_name(m));
}

// Accepts `value` when it agrees with `fallback` to ~1e-9 relative, so exact
// metadata refines values recovered from directives without overriding edits.
double refine(double fallback, std::optional<double> exact) {
  if (!exact) return fallback;
  const double scale = std::max({1e-300, std::abs(fallback), std::abs(*exact)});
  return std::abs(*exact - fallback) <= 1e-9 * scale ? *exact : fallback;
}

struct Arity {
  int min;
  int max;
};

const std::map<std::string, Arity, std::less<>>& known_directives() {
  static const std::map<std::string, Arity, std::less<>> table = {
      {"domain", {3, 3}},          {"dx_dy_dz", {3, 3}},       {"time_window", {1, 1}},
      {"soil_peplinski", {7, 7}},  {"material", {5, 5}},       {"cylinder", {8, 9}},
      {"rx", {3, 3}},              {"src_steps", {3, 3}},      {"rx_steps", {3, 3}},
      {"waveform", {4, 4}},        {"hertzian_dipole", {5, 5}}, {"messages", {1, 1}},
      {"title", {1, 1 << 20}},     {"fractal_box", {13, 15}},  {"add_surface_roughness", {12, 13}},
  };
  return table;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (!std::isfinite(value)) fail(ErrorCode::invalid_argument, "format_number: non-finite value");
  const double mag = std::abs(value);
  if (mag >= 1e-3 && mag < 1e6) return shortest(value, std::chars_format::fixed);

  // Scientific shortest form "d.ddde±XX" -> digits + exponent.
  const std::string sci = shortest(mag, std::chars_format::scientific);
  const auto epos = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, epos))
    if (c != '.') digits.push_back(c);
  const int exp = std::stoi(sci.substr(epos + 1));
  const int exp3 = static_cast<int>(std::floor(exp / 3.0)) * 3;
  const std::size_t int_digits = static_cast<std::size_t>(exp - exp3) + 1;
  while (digits.size() < int_digits) digits.push_back('0');
  std::string mant = digits.substr(0, int_digits);
  if (digits.size() > int_digits) mant += "." + digits.substr(int_digits);
  return (value < 0 ? "-" : "") + mant + "e" + std::to_string(exp3);
}

std::string emit_gprmax_config(const SimulationScene& scene, const MaterialTable& materials) {
  scene.validate();
  const auto f = [](double v) { return format_number(v); };
  const double D = scene.domain_depth;
  const double dz = scene.cell_size;
  const auto& cyl = scene.cylinder;
  const auto& trav = scene.traversal;
  const double ant_y = D - trav.antenna_depth;
  const double cyl_y = D - cyl.center_depth;
  std::ostringstream o;

  if (scene.soil.peplinski_params) {
    o << "#soil_peplinski:";
    for (const auto& tok : *scene.soil.peplinski_params) o << ' ' << tok;
    o << "\n-----\n";
  }
  o << "#domain: " << f(scene.domain_width) << ' ' << f(D) << ' ' << f(dz) << '\n';
  o << "#dx_dy_dz: " << f(dz) << ' ' << f(dz) << ' ' << f(dz) << '\n';
  o << "#time_window: " << f(scene.time_window) << '\n';
  o << "-----\n";
  for (const auto& line : scene.passthrough_directives) o << line << '\n';
  if (cyl.material != ClassLabel::metallic) {
    o << "#material: " << f(materials.permittivity(cyl.material)) << " 0 1 0 "
      << material_id(cyl.material) << '\n';
  }
  o << "#cylinder: " << f(cyl.center_x) << ' ' << f(cyl_y) << " 0 " << f(cyl.center_x) << ' '
    << f(cyl_y) << ' ' << f(dz) << ' ' << f(cyl.radius) << ' ' << material_id(cyl.material)
    << " y\n";
  o << "-----\n";
  o << "#rx: " << f(trav.rx_start) << ' ' << f(ant_y) << " 0\n";
  o << "#src_steps: " << f(trav.step) << " 0 0\n";
  o << "#rx_steps: " << f(trav.step) << " 0 0\n";
  o << "-----\n";
  o << "#waveform: " << scene.waveform.kind << ' ' << f(scene.waveform.amplitude) << ' '
    << f(scene.waveform.center_frequency) << ' ' << scene.waveform.id << '\n';
  o << "#hertzian_dipole: z " << f(trav.tx_start) << ' ' << f(ant_y) << " 0 " << scene.waveform.id
    << '\n';
  o << "#messages: " << (scene.messages ? "y" : "n") << '\n';
  for (const auto& line : scene.comments) o << line << '\n';

  auto meta = [&](std::string_view key, const std::string& value) {
    o << kMetaPrefix << key << " = " << value << '\n';
  };
  meta("domain_width", f(scene.domain_width));
  meta("domain_depth", f(D));
  meta("cell_size", f(dz));
  meta("time_window", f(scene.time_window));
  meta("soil.mean_rel_permittivity", f(scene.soil.mean_rel_permittivity));
  meta("soil.heterogeneity", f(scene.soil.heterogeneity));
  meta("soil.correlation_length", f(scene.soil.correlation_length));
  meta("soil.conductivity", f(scene.soil.conductivity));
  meta("cylinder.material", std::string(class_name(cyl.material)));
  meta("cylinder.center_x", f(cyl.center_x));
  meta("cylinder.center_depth", f(cyl.center_depth));
  meta("cylinder.radius", f(cyl.radius));
  meta("traversal.tx_start", f(trav.tx_start));
  meta("traversal.rx_start", f(trav.rx_start));
  meta("traversal.step", f(trav.step));
  meta("traversal.num_traces", std::to_string(trav.num_traces));
  meta("traversal.antenna_depth", f(trav.antenna_depth));
  meta("direct_wave", scene.direct_wave ? "1" : "0");
  meta("seed", std::to_string(scene.seed));
  return o.str();
}

SimulationScene parse_gprmax_config(std::string_view text) {
  SimulationScene scene;
  scene.soil.peplinski_params.reset();
  std::map<std::string, std::string, std::less<>> meta;
  std::map<std::string, int, std::less<>> meta_line;
  std::map<std::string, double, std::less<>> material_eps;

  struct Seen {
    std::optional<std::vector<double>> domain, cylinder_xyz;
    std::optional<double> tx_y, rx_y, cell, time_window, step, radius;
    std::optional<std::string> cyl_material;
    int cyl_line = 0;
  } seen;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.find_first_not_of('-') == std::string::npos) continue;
    if (line[0] != '#') {
      if (line.starts_with(kMetaPrefix)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "metadata line without '='");
        const std::string key = trim(std::string_view(line).substr(kMetaPrefix.size(), eq - kMetaPrefix.size()));
        meta[key] = trim(std::string_view(line).substr(eq + 1));
        meta_line[key] = lineno;
      } else {
        scene.comments.push_back(raw);
      }
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) parse_fail(lineno, "directive without ':'");
    const std::string name = line.substr(1, colon - 1);
    const auto args = split_ws(std::string_view(line).substr(colon + 1));
    const auto it = known_directives().find(name);
    if (it == known_directives().end()) parse_fail(lineno, "unknown directive '#" + name + ":'");
    const int n = static_cast<int>(args.size());
    if (n < it->second.min || n > it->second.max) {
      parse_fail(lineno, "'#" + name + ":' expects " + std::to_string(it->second.min) +
                             (it->second.max != it->second.min ? "+" : "") + " arguments, got " +
                             std::to_string(n));
    }
    auto num = [&](int k) { return to_double(args[k], lineno); };

    if (name == "domain") {
      seen.domain = std::vector<double>{num(0), num(1), num(2)};
    } else if (name == "dx_dy_dz") {
      seen.cell = num(0);
    } else if (name == "time_window") {
      seen.time_window = num(0);
    } else if (name == "soil_peplinski") {
      std::array<std::string, 7> p;
      std::copy(args.begin(), args.end(), p.begin());
      scene.soil.peplinski_params = p;
    } else if (name == "material") {
      const std::string& id = args[4];
      if (id == "pvc" || id == "concrete") {
        material_eps[id] = num(0);
      } else {
        scene.passthrough_directives.push_back(line);
      }
    } else if (name == "cylinder") {
      seen.cylinder_xyz = std::vector<double>{num(0), num(1)};
      seen.radius = num(6);
      seen.cyl_material = args[7];
      seen.cyl_line = lineno;
    } else if (name == "rx") {
      scene.traversal.rx_start = num(0);
      seen.rx_y = num(1);
    } else if (name == "src_steps") {
      seen.step = num(0);
    } else if (name == "rx_steps") {
      if (seen.step && num(0) != *seen.step) {
        parse_fail(lineno, "receiver and source steps differ; only common-offset traversals are supported");
      }
      seen.step = num(0);
    } else if (name == "waveform") {
      if (args[0] != "ricker") parse_fail(lineno, "unsupported waveform '" + args[0] + "'");
      scene.waveform.kind = args[0];
      scene.waveform.amplitude = num(1);
      scene.waveform.center_frequency = num(2);
      scene.waveform.id = args[3];
    } else if (name == "hertzian_dipole") {
      if (args[0] != "z") parse_fail(lineno, "only z-polarized sources are supported");
      scene.traversal.tx_start = num(1);
      seen.tx_y = num(2);
      if (args[4] != scene.waveform.id) scene.waveform.id = args[4];
    } else if (name == "messages") {
      scene.messages = args[0] == "y";
    } else {
      if (name == "fractal_box" && n >= 14) {
        scene.seed = static_cast<std::uint64_t>(to_int(args[13], lineno));
      }
      scene.passthrough_directives.push_back(line);
    }
  }

  auto missing = [&](const char* what) {
    fail(ErrorCode::parse_error, std::string("gprMax config: missing required directive ") + what);
  };
  if (!seen.domain) missing("#domain:");
  if (!seen.cell) missing("#dx_dy_dz:");
  if (!seen.time_window) missing("#time_window:");
  if (!seen.cylinder_xyz) missing("#cylinder:");
  if (!seen.tx_y) missing("#hertzian_dipole:");
  if (!seen.rx_y) missing("#rx:");
  if (!seen.step) missing("#src_steps:");

  auto meta_num = [&](const char* key) -> std::optional<double> {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    return to_double(it->second, meta_line[key]);
  };

  scene.domain_width = refine((*seen.domain)[0], meta_num("domain_width"));
  scene.domain_depth = refine((*seen.domain)[1], meta_num("domain_depth"));
  scene.cell_size = refine(*seen.cell, meta_num("cell_size"));
  scene.time_window = refine(*seen.time_window, meta_num("time_window"));
  const double D = scene.domain_depth;

  const std::string& mat = *seen.cyl_material;
  if (mat == "pec") {
    scene.cylinder.material = ClassLabel::metallic;
  } else if (mat == "pvc" || mat == "concrete") {
    scene.cylinder.material = class_from_name(mat);
  } else {
    parse_fail(seen.cyl_line, "cylinder material '" + mat + "' is not one of pec, pvc, concrete");
  }
  scene.cylinder.center_x = refine((*seen.cylinder_xyz)[0], meta_num("cylinder.center_x"));
  scene.cylinder.center_depth = refine(D - (*seen.cylinder_xyz)[1], meta_num("cylinder.center_depth"));
  scene.cylinder.radius = refine(*seen.radius, meta_num("cylinder.radius"));

  auto& trav = scene.traversal;
  trav.tx_start = refine(trav.tx_start, meta_num("traversal.tx_start"));
  trav.rx_start = refine(trav.rx_start, meta_num("traversal.rx_start"));
  trav.step = refine(*seen.step, meta_num("traversal.step"));
  trav.antenna_depth = refine(D - *seen.tx_y, meta_num("traversal.antenna_depth"));

  if (auto v = meta_num("soil.mean_rel_permittivity")) scene.soil.mean_rel_permittivity = *v;
  if (auto v = meta_num("soil.heterogeneity")) scene.soil.heterogeneity = *v;
  if (auto v = meta_num("soil.correlation_length")) scene.soil.correlation_length = *v;
  if (auto v = meta_num("soil.conductivity")) scene.soil.conductivity = *v;
  if (auto it = meta.find("traversal.num_traces"); it != meta.end()) {
    trav.num_traces = static_cast<int>(to_int(it->second, meta_line["traversal.num_traces"]));
  }
  if (auto it = meta.find("direct_wave"); it != meta.end()) scene.direct_wave = it->second != "0";
  if (auto it = meta.find("seed"); it != meta.end()) {
    scene.seed = static_cast<std::uint64_t>(to_int(it->second, meta_line["seed"]));
  }
  return scene;
}

}  // namespace gprlab::sim
