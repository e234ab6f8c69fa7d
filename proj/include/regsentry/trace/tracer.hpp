#pragma once

#include <set>
#include <string>
#include <vector>

#include "regsentry/change/diff.hpp"
#include "regsentry/trace/interpreter.hpp"
#include "regsentry/trace/trace_log.hpp"

namespace regsentry::trace {

enum class Suite { Base, Upgrade };

/// A harness file holding exactly one zero-parameter function
/// `test_<name>` that drives the unit under analysis.
struct TestCase {
  std::string name;
  std::string harness_path;
  Suite suite = Suite::Base;
  minic::SourceUnit harness;
};

/// Parses and validates a harness file. Harnesses may not use `assume`.
TestCase load_test(const std::string& path, Suite suite);
TestCase make_test(const std::string& source, Suite suite, const std::string& path = "<harness>");

/// Reads a manifest (one harness path per line, relative to the manifest's
/// directory; blank lines and `#` comments ignored).
std::vector<TestCase> load_manifest(const std::string& path, Suite suite);

struct TraceConfig {
  int width = 16;
  std::uint64_t step_budget = 1'000'000;
};

/// Runs one test against `version`, sampling every ENTRY/EXIT/LOOP point of
/// the monitored functions. RuntimeFault propagates.
TraceLog run_test(const minic::SourceUnit& version, const TestCase& test,
                  const std::set<std::string>& monitored, Version which,
                  const TraceConfig& config = {});

/// Runs every test (concurrently up to `parallelism`) and merges the logs in
/// test order.
TraceLog run_suite(const minic::SourceUnit& version, const std::vector<TestCase>& tests,
                   const std::set<std::string>& monitored, Version which,
                   const TraceConfig& config = {}, int parallelism = 1);

}  // namespace regsentry::trace
