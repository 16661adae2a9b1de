#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stefan/config.hpp"

namespace stefan::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Command-line overrides; everything scientific lives in the config file.
struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_threads;  // wall-time knob, never changes results
};

// Executes the config and writes report.json, CSV tables, and manifest.json
// into the output directory.  Returns the process exit status and prints a
// diagnostic to stderr on failure: 0 success, 1 validation, 2 solver, 3 IO.
int run(const std::string& config_path, const RunOverrides& overrides = {});

// Column-oriented CSV writer: header row then one row per index, values at
// 17 significant digits (lossless for doubles), CRLF line endings.
void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns);

}  // namespace stefan::cli
