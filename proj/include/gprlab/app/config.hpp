#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gprlab/clf/train.hpp"
#include "gprlab/core/bscan.hpp"
#include "gprlab/freq/stft.hpp"
#include "gprlab/gan/model.hpp"
#include "gprlab/sim/sampling.hpp"

namespace gprlab::app {

struct SimulationSettings {
  std::string engine = "analytic";  // analytic | fdtd
  int canvas = kCanvasSize;
  int count = 300;
  int threads = 1;
  sim::SceneRanges ranges;  // base scene defaults to the reference scene
};

struct ExperimentSettings {
  std::vector<std::uint64_t> seeds;  // empty: five seeds starting at the global seed
  std::vector<clf::ClassifierKind> kinds{clf::ClassifierKind::time, clf::ClassifierKind::frequency,
                                         clf::ClassifierKind::combined};
  int samples_per_class = 100;
  double test_fraction = 0.3;
  int train_count = 0;  // cap on real training images, 0 keeps all
};

/// Everything a run needs, loaded from one JSON document.
struct RunConfig {
  std::filesystem::path output_dir = "gprlab-run";
  std::uint64_t seed = 0;
  SimulationSettings simulation;
  PreprocessOptions preprocess;
  freq::SpectrogramConfig frequency;
  gan::GanConfig gan;
  clf::ClassifierTrainConfig classifier;
  ExperimentSettings experiment;

  std::vector<std::uint64_t> experiment_seeds() const;
  void validate() const;
};

using Environment = std::map<std::string, std::string>;

/// Canonical JSON with every field.
std::string run_config_to_json(const RunConfig& cfg);

/// Parses a config document, then applies GPRLAB_ environment overrides.
/// Nested keys are joined with "__" (GPRLAB_GAN__MAX_STEPS=100); values are
/// read as JSON when they parse, otherwise as strings. Unknown keys in the
/// document or the environment raise config_error. gan.seed and
/// classifier.seed default to the global seed when not given.
RunConfig run_config_from_json(const std::string& text, const Environment& env = {});
RunConfig load_run_config(const std::filesystem::path& path, const Environment& env = {});

/// SHA-256 of the canonical JSON without output_dir, so identical
/// computations hash equal wherever they are written.
std::string run_config_hash(const RunConfig& cfg);

/// Current process environment restricted to GPRLAB_ variables.
Environment process_environment();

}  // namespace gprlab::app
