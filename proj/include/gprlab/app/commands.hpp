#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gprlab/app/config.hpp"
#include "gprlab/core/error.hpp"

namespace gprlab::app {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitLeakage = 4;

int exit_code(ErrorCode code);

struct CommandContext {
  RunConfig config;
  std::string config_hash;
  bool force = false;
  std::ostream* log = nullptr;

  std::filesystem::path run_dir() const { return config.output_dir; }
};

CommandContext make_context(RunConfig config, bool force, std::ostream* log);

enum class StageOutcome { ran, up_to_date };

/// Each command writes its outputs under the run directory and records them
/// in run_manifest.json. A stage whose recorded inputs hash equal and whose
/// artifacts all exist is left alone; existing outputs with a different
/// hash are only replaced with force.
StageOutcome cmd_simulate(const CommandContext& ctx, std::optional<int> n,
                          std::optional<std::string> engine, bool emit_gprmax);
StageOutcome cmd_preprocess(const CommandContext& ctx, std::optional<std::filesystem::path> input);
StageOutcome cmd_transform(const CommandContext& ctx, std::optional<std::filesystem::path> input);
StageOutcome cmd_train_gan(const CommandContext& ctx, std::optional<std::filesystem::path> input,
                           bool resume);
StageOutcome cmd_sample(const CommandContext& ctx, std::optional<std::filesystem::path> checkpoint,
                        std::optional<int> per_class);
StageOutcome cmd_train_clf(const CommandContext& ctx, const std::string& kind,
                           std::optional<std::filesystem::path> input, bool augment);
StageOutcome cmd_evaluate(const CommandContext& ctx, std::optional<std::filesystem::path> input,
                          std::optional<std::filesystem::path> generated, bool augment);
StageOutcome cmd_report(const CommandContext& ctx);

/// Full command line (args[0] is the program name). Returns the exit code:
/// 0 success, 2 config error, 3 numerical abort, 4 leakage abort, 1 other.
int run_cli(const std::vector<std::string>& args, const Environment& env, std::ostream& out,
            std::ostream& err);

}  // namespace gprlab::app
