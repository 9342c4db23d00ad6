#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "deblur/core.hpp"

namespace deblur::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Everything one `deblur` invocation needs.
struct RunManifest {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir = ".";
  SolverConfig config;
  std::optional<std::filesystem::path> reference;
  int max_shift = 0;
  bool dump_traces = false;
  bool dump_levels = false;
  int jobs = 1;
};

struct SynthesizeOptions {
  std::filesystem::path input;
  std::string kernel = "delta";  // generator spec or kernel text file
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};

struct ScoreOptions {
  std::filesystem::path restored;
  std::filesystem::path reference;
  int max_shift = 0;
  std::optional<std::filesystem::path> out;  // CSV; stdout when absent
};

/// Parses "N" or "RxC".
Size2 parse_kernel_size(const std::string& text);

/// Result of parsing the command line without running anything.
struct ParsedCommand {
  std::string name;  // "deblur", "synthesize" or "score"
  RunManifest deblur;
  SynthesizeOptions synthesize;
  ScoreOptions score;
};

/// Throws CLI11 parse errors as-is; semantic errors as deblur::Error.
ParsedCommand parse_command_line(const std::vector<std::string>& args);

int cmd_deblur(const RunManifest& manifest);
int cmd_synthesize(const SynthesizeOptions& opts);
int cmd_score(const ScoreOptions& opts);

/// Full entry point: parse, dispatch, map failures to exit codes. `args`
/// excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace deblur::cli
