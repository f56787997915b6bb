#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gprlab/core/bscan.hpp"

namespace gprlab {

inline constexpr int kDatasetVersion = 1;

struct LabeledImage {
  RadarImage image;
  std::optional<ClassLabel> label;
  std::optional<std::uint64_t> scene_seed;
};

struct ManifestItem {
  std::string sample_path;  // relative to the dataset directory
  int rows = 0;
  int cols = 0;
  DomainTag domain = DomainTag::time;
  std::optional<int> label;
  std::optional<std::uint64_t> scene_seed;
};

/// On-disk index of a dataset directory (`manifest.json`). Sample files are
/// headerless row-major float32 little-endian.
struct DatasetManifest {
  int version = kDatasetVersion;
  std::vector<ManifestItem> items;
  std::map<int, std::string> class_map;
};

DatasetManifest save_dataset(std::span<const LabeledImage> items, const std::filesystem::path& dir);

std::pair<std::vector<LabeledImage>, DatasetManifest> load_dataset(
    const std::filesystem::path& dir);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

/// Raw float32 little-endian blob helpers shared with checkpoints.
void write_f32_file(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> read_f32_file(const std::filesystem::path& path, std::size_t expected_count);

}  // namespace gprlab
