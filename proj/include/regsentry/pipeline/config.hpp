#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regsentry/bmc/vc.hpp"

namespace regsentry::pipeline {

/// Settings of one regression analysis. Relative paths in a config file are
/// resolved against the file's directory.
struct PipelineConfig {
  std::filesystem::path base_dir;
  std::filesystem::path upgraded_dir;
  std::string sources = "*.mc";
  std::filesystem::path tests_base;
  std::filesystem::path tests_upgrade;  // empty: no upgrade suite
  int unroll_bound = 5;
  int inline_depth = 16;
  int bit_width = 16;
  int min_support = 1;
  std::int64_t solver_budget = 100000;          // conflicts per query
  std::int64_t solver_decision_budget = -1;     // decisions per query, -1 unlimited
  std::int64_t solver_timeout_ms = 10000;       // wall clock per query, 0 unlimited
  bool unwinding_assertions = false;
  std::uint64_t step_budget = 1'000'000;
  int parallelism = 1;
  std::filesystem::path output_dir = "regsentry-out";
  /// Directory of the config file; report paths are shown relative to it.
  std::filesystem::path root = ".";

  bmc::BmcConfig bmc() const;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on
/// unknown keys, malformed values or missing required keys.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& root);
PipelineConfig load_config(const std::filesystem::path& path);

/// Regular files of `dir` whose name matches the glob, sorted.
std::vector<std::filesystem::path> list_sources(const std::filesystem::path& dir, const std::string& pattern);

/// Throws ConfigError unless both version directories exist and hold at
/// least one source matching `sources`, and the base manifest exists.
void validate(const PipelineConfig& cfg);

}  // namespace regsentry::pipeline
