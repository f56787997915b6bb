#include "gprlab/core/dataset.hpp"

#include "gprlab/core/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gprlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void to_little_endian(std::vector<char>& bytes) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i + 4 <= bytes.size(); i += 4) {
      std::reverse(bytes.begin() + static_cast<std::ptrdiff_t>(i),
                   bytes.begin() + static_cast<std::ptrdiff_t>(i + 4));
    }
  }
}

std::string sample_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06zu.f32", index);
  return buf;
}

}  // namespace

void write_f32_file(const fs::path& path, std::span<const float> values) {
  std::vector<char> bytes(values.size() * sizeof(float));
  if (!values.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
  to_little_endian(bytes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io_error, "short write to " + path.string());
}

std::vector<float> read_f32_file(const fs::path& path, std::size_t expected_count) {
  if (!fs::exists(path)) fail(ErrorCode::missing_sample, "file not found: " + path.string());
  const auto size = fs::file_size(path);
  if (size != expected_count * sizeof(float)) {
    fail(ErrorCode::shape_mismatch, path.string() + " holds " + std::to_string(size) +
                                        " bytes, expected " +
                                        std::to_string(expected_count * sizeof(float)));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<char> bytes(size);
  in.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!in) fail(ErrorCode::io_error, "short read from " + path.string());
  to_little_endian(bytes);
  std::vector<float> values(expected_count);
  if (size) std::memcpy(values.data(), bytes.data(), size);
  return values;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json j;
  j["version"] = manifest.version;
  json cmap = json::object();
  for (const auto& [id, name] : manifest.class_map) cmap[std::to_string(id)] = name;
  j["class_map"] = cmap;
  json items = json::array();
  for (const auto& item : manifest.items) {
    json e;
    e["path"] = item.sample_path;
    e["shape"] = {item.rows, item.cols};
    e["domain"] = std::string(to_string(item.domain));
    e["label"] = item.label ? json(*item.label) : json(nullptr);
    e["scene_seed"] = item.scene_seed ? json(*item.scene_seed) : json(nullptr);
    items.push_back(std::move(e));
  }
  j["items"] = std::move(items);
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    DatasetManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != kDatasetVersion) {
      fail(ErrorCode::unknown_version, "dataset manifest version " + std::to_string(m.version));
    }
    for (const auto& [key, value] : j.at("class_map").items()) {
      m.class_map[std::stoi(key)] = value.get<std::string>();
    }
    for (const auto& e : j.at("items")) {
      ManifestItem item;
      item.sample_path = e.at("path").get<std::string>();
      const auto& shape = e.at("shape");
      if (!shape.is_array() || shape.size() != 2) {
        fail(ErrorCode::parse_error, "item shape must be [rows, cols]");
      }
      item.rows = shape[0].get<int>();
      item.cols = shape[1].get<int>();
      item.domain = domain_from_string(e.at("domain").get<std::string>());
      if (!e.at("label").is_null()) {
        item.label = e.at("label").get<int>();
        class_from_id(*item.label);
      }
      if (e.contains("scene_seed") && !e.at("scene_seed").is_null()) {
        item.scene_seed = e.at("scene_seed").get<std::uint64_t>();
      }
      m.items.push_back(std::move(item));
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed manifest: ") + e.what());
  }
}

DatasetManifest save_dataset(std::span<const LabeledImage> items, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());

  DatasetManifest manifest;
  for (int id = 0; id < kNumClasses; ++id) {
    manifest.class_map[id] = std::string(class_name(class_from_id(id)));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    item.image.validate();
    ManifestItem entry;
    entry.sample_path = sample_name(i);
    entry.rows = item.image.rows();
    entry.cols = item.image.cols();
    entry.domain = item.image.domain;
    if (item.label) entry.label = class_id(*item.label);
    entry.scene_seed = item.scene_seed;
    write_f32_file(dir / entry.sample_path,
                   std::span(item.image.pixels.data(), static_cast<std::size_t>(item.image.pixels.size())));
    manifest.items.push_back(std::move(entry));
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot write manifest in " + dir.string());
  out << manifest_to_json(manifest);
  return manifest;
}

std::pair<std::vector<LabeledImage>, DatasetManifest> load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    fail(ErrorCode::missing_sample, "no manifest.json in " + dir.string());
  }
  std::ifstream in(manifest_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  DatasetManifest manifest = manifest_from_json(buffer.str());

  std::vector<LabeledImage> items;
  items.reserve(manifest.items.size());
  for (const auto& entry : manifest.items) {
    require(entry.rows > 0 && entry.cols > 0, ErrorCode::shape_mismatch,
            "non-positive shape for " + entry.sample_path);
    const fs::path path = dir / entry.sample_path;
    if (!fs::exists(path)) fail(ErrorCode::missing_sample, "missing sample " + path.string());
    auto values = read_f32_file(path, static_cast<std::size_t>(entry.rows) * entry.cols);
    LabeledImage item;
    item.image.domain = entry.domain;
    item.image.pixels = Eigen::Map<ImageRM>(values.data(), entry.rows, entry.cols);
    if (entry.label) item.label = class_from_id(*entry.label);
    item.scene_seed = entry.scene_seed;
    items.push_back(std::move(item));
  }
  return {std::move(items), std::move(manifest)};
}

}  // namespace gprlab
