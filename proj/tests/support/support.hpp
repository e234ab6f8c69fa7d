#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "regsentry/bmc/checker.hpp"
#include "regsentry/change/diff.hpp"
#include "regsentry/infer/property.hpp"
#include "regsentry/minic/analyzer.hpp"
#include "regsentry/trace/trace_log.hpp"

namespace regsentry::testing {

using minic::Value;
using Args = std::vector<std::vector<Value>>;

/// Shipped example data (data/ in the source tree).
std::filesystem::path data_dir();
/// Test-only data (tests/data in the source tree).
std::filesystem::path test_data_dir();
/// Fresh scratch directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

minic::AnalyzedUnit analyze_text(const std::string& source);

struct GenOptions {
  int functions = 3;
  int max_params = 2;
  int max_locals = 3;
  int max_statements = 4;
  int max_loop_trips = 4;
  int max_expr_depth = 2;
  bool loops = true;
};

/// Random well-formed MiniC program over int scalars. Functions are named
/// f0..fn-1 and fk only calls fj with j < k. Every loop counts a dedicated
/// counter up to a constant of at most max_loop_trips.
std::string random_program(std::mt19937& rng, const GenOptions& options = {});

/// Number of int slots over all parameters of `function`.
int input_slots(const minic::AnalyzedUnit& unit, const std::string& function);
/// Splits flat slot values into per-parameter vectors.
Args split_args(const minic::AnalyzedUnit& unit, const std::string& function, const std::vector<Value>& flat);
/// Calls fn with every W-bit assignment of the parameters of `function`.
void for_each_input(const minic::AnalyzedUnit& unit, const std::string& function, int width,
                    const std::function<void(const Args&)>& fn);
Args random_args(const minic::AnalyzedUnit& unit, const std::string& function, int width, std::mt19937& rng);

/// Samples every point of every function while calling `entry` on each
/// argument vector. Runtime faults are skipped.
trace::TraceLog trace_calls(const minic::AnalyzedUnit& unit, const std::string& entry,
                            const std::vector<Args>& inputs, int width);

/// For every property, whether some W-bit input of `entry` reaches its point
/// with the property false.
std::vector<bool> exhaustive_falsified(const minic::AnalyzedUnit& unit, const std::string& entry,
                                       const std::vector<infer::Property>& props, int width);

/// Every function of `unit`, for scoping inference over all of it.
change::AnalysisScope whole_scope(const minic::AnalyzedUnit& unit);

/// Shipped BMC oracle program: header comments `// width W` and
/// `// entry name` followed by the source.
struct OracleProgram {
  std::string name;
  std::string source;
  int width = 8;
  std::string entry;
};
std::vector<OracleProgram> oracle_programs();

/// Counters shared by tests that produce VIOLATED verdicts.
struct ReplayTally {
  std::size_t violated = 0;
  std::size_t replay_failures = 0;
};
/// Replays every VIOLATED verdict of `verdicts` (aligned with iu.properties)
/// against the original program and tallies failures.
void tally_replays(const bmc::InstrumentedUnit& iu, const std::vector<bmc::Verdict>& verdicts,
                   const bmc::BmcConfig& cfg, ReplayTally& tally);

/// Infers properties of `program` from a few random runs, model checks them
/// from its entry and compares each verdict against exhaustive enumeration.
struct OracleOutcome {
  std::size_t properties = 0;
  std::size_t valid = 0;
  std::size_t violated = 0;
  std::size_t unknown = 0;
  std::vector<std::string> disagreements;
};
OracleOutcome compare_with_enumeration(const OracleProgram& program, std::uint32_t seed, ReplayTally& tally,
                                       int unroll_bound = 5);

}  // namespace regsentry::testing
