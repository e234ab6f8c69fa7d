#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regsentry/minic/analyzer.hpp"
#include "regsentry/minic/semantics.hpp"

namespace regsentry::trace {

using minic::Value;

enum class Version { Base, Upgraded };
const char* to_string(Version v);

/// Variable names observed at one program point, in schema order.
struct PointSchema {
  minic::ProgramPoint point;
  std::vector<std::string> variables;

  friend bool operator==(const PointSchema&, const PointSchema&) = default;
};

/// One snapshot at a program point. `values` align with the schema of
/// TraceLog::points[point].
struct TraceSample {
  int point = 0;
  std::string test;
  std::uint64_t sequence = 0;
  std::vector<Value> values;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct TraceLog {
  Version version = Version::Base;
  int width = 16;
  std::vector<std::string> tests_run;
  std::vector<PointSchema> points;
  std::vector<TraceSample> samples;

  int find_point(const minic::ProgramPoint& point) const;
  /// Index of the schema for `info`, adding it when absent.
  int intern(const minic::PointInfo& info);

  friend bool operator==(const TraceLog&, const TraceLog&) = default;
};

/// Binding lookup over a sample and its schema.
class SampleView {
 public:
  SampleView(const PointSchema& schema, const TraceSample& sample)
      : schema_(&schema), sample_(&sample) {}

  const minic::ProgramPoint& point() const { return schema_->point; }
  std::optional<Value> get(const std::string& name) const;
  const TraceSample& sample() const { return *sample_; }

 private:
  const PointSchema* schema_;
  const TraceSample* sample_;
};

/// Appends `other` to `log`, re-indexing point schemas.
void append(TraceLog& log, const TraceLog& other);

/// Line-oriented text format:
///   trace 1
///   version BASE|UPGRADED
///   width <W>
///   test <name>                              (one per test run)
///   point <function> <ENTRY|EXIT|LOOP k> <var>...
///   s <point-index> <test-name> <seq> <value>...
void write_trace(const TraceLog& log, const std::string& path);
std::string format_trace(const TraceLog& log);
TraceLog read_trace(const std::string& path);
TraceLog parse_trace(const std::string& text);

}  // namespace regsentry::trace
