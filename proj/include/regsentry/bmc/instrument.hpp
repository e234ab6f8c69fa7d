#pragma once

#include <map>
#include <string>
#include <vector>

#include "regsentry/infer/property.hpp"
#include "regsentry/minic/analyzer.hpp"
#include "regsentry/minic/printer.hpp"

namespace regsentry::bmc {

/// Position in the original (non-instrumented) sources.
struct OriginalLine {
  int file = 0;
  int line = 0;

  friend bool operator==(const OriginalLine&, const OriginalLine&) = default;
};

/// A program version with property assertions inserted.
///
/// Each `assert` statement carries in `ordinal` the index of its property
/// in `properties`. EXIT assertions of non-void functions read the result
/// through a temporary `__retN` declared right before the return.
struct InstrumentedUnit {
  const minic::AnalyzedUnit* original = nullptr;
  minic::AnalyzedUnit unit;
  std::vector<infer::Property> properties;
  std::vector<std::size_t> unmappable;  // indices into the instrumented property list
  minic::PrintedUnit printed;
  /// Original position of every printed line, index = line - 1.
  std::vector<OriginalLine> line_map;
  /// Printed line of each function header.
  std::map<std::string, int> function_line;

  OriginalLine original_line(int printed_line) const;
  /// Printed line of a statement of `unit`.
  int line_of(const minic::Stmt& s) const;
  std::string text() const { return printed.text(); }
};

/// True when the property's point exists in `unit` and observes every
/// variable of the formula.
bool mappable(const infer::Property& p, const minic::AnalyzedUnit& unit);

/// Inserts one assertion per mappable property:
///   ENTRY   first statements of the body;
///   LOOP k  before the loop, at the head of its body and right after it;
///   EXIT    before every return, and at the end of a void body that can
///           fall through.
/// Properties whose point or variables do not exist in `unit` are listed in
/// `unmappable` and get no assertion.
InstrumentedUnit instrument(const minic::AnalyzedUnit& unit, const std::vector<infer::Property>& props);

/// Removes the inserted assertions and temporaries.
minic::SourceUnit strip(const InstrumentedUnit& iu);

/// MiniC expression for a formula; `return` is renamed to `result_name`.
minic::ExprPtr formula_expr(const infer::Formula& f, const minic::PointInfo& point,
                            const std::string& result_name);

}  // namespace regsentry::bmc
