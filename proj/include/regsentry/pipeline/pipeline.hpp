#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "regsentry/bmc/checker.hpp"
#include "regsentry/change/diff.hpp"
#include "regsentry/infer/property.hpp"
#include "regsentry/pipeline/config.hpp"
#include "regsentry/trace/tracer.hpp"

namespace regsentry::pipeline {

using Json = nlohmann::ordered_json;

/// The first upgrade-suite sample that falsified a property.
struct OutdatedEvidence {
  std::string test;
  std::uint64_t sequence = 0;
  std::vector<std::pair<std::string, minic::Value>> bindings;
};

/// A property and the evidence behind its current status.
struct PropertyRecord {
  infer::Property property;
  std::optional<bmc::Verdict> base_verdict;      // phase 2
  std::optional<OutdatedEvidence> outdated_by;   // phase 3
  std::optional<bmc::Verdict> upgraded_verdict;  // phase 4
};

struct Report {
  std::string timestamp;
  int phases_completed = 0;
  bool no_change = false;
  change::ChangeSet change_set;
  change::AnalysisScope scope;
  std::vector<std::string> tests_base;
  std::vector<std::string> tests_upgrade;
  std::vector<PropertyRecord> properties;  // canonical order

  std::size_t count(infer::Status s) const;
  /// 1 when some property is VIOLATED, else 0.
  int exit_status() const;
};

struct Versions {
  minic::AnalyzedUnit base;
  minic::AnalyzedUnit upgraded;
};

/// Parses and analyzes every source of both version directories.
Versions load_versions(const PipelineConfig& cfg);

enum class Format { Json, Text, Both };

struct RunOptions {
  int resume_from = 1;  // 1..4
  bool emit_cnf = false;
  Format format = Format::Both;
  bool write_files = true;
};

/// Runs the four phases in order, persisting intermediate artifacts under
/// output_dir after each one. Errors are rethrown prefixed with the phase.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, RunOptions options = {});

  /// Traces the base suite and infers dynamic properties.
  void phase1_generate();
  /// Keeps the dynamic properties the base version provably satisfies.
  void phase2_true();
  /// Separates outdated properties using the upgrade suite.
  void phase3_outdated();
  /// Model checks the non-regression properties on the upgraded version.
  void phase4_check();

  /// Runs the phases from options.resume_from on and writes the reports.
  const Report& run();

  const Report& report() const { return report_; }
  const Versions& versions() const { return versions_; }
  const PipelineConfig& config() const { return cfg_; }

  Json to_json() const;
  std::string to_text() const;

 private:
  void save_state() const;
  void load_state();
  void write_properties(const std::string& name, infer::Status status) const;
  void ensure_tests();
  std::string display_path(int file, bool upgraded) const;
  bmc::CheckOptions check_options(const std::string& phase) const;

  PipelineConfig cfg_;
  RunOptions options_;
  Versions versions_;
  Report report_;
  std::optional<std::vector<trace::TestCase>> base_tests_;
  std::optional<std::vector<trace::TestCase>> upgrade_tests_;
};

/// Convenience wrapper: constructs a Pipeline and runs it.
Report run_all(const PipelineConfig& cfg, const RunOptions& options = {});

/// Lines where properties of `point` are anchored in `unit`: the function
/// header for ENTRY, the loop header for LOOP, every return for EXIT.
std::vector<bmc::OriginalLine> anchor_lines(const minic::AnalyzedUnit& unit, const minic::ProgramPoint& point);

}  // namespace regsentry::pipeline
