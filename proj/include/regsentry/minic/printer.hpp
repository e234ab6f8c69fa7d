#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "regsentry/minic/ast.hpp"

namespace regsentry::minic {

std::string print(const Expr& e);
std::string print(const SourceUnit& unit);

/// One line of canonical output and the original construct it came from.
struct PrintedLine {
  std::string text;
  std::optional<Span> origin;
  bool synthetic = false;
};

struct PrintedUnit {
  std::vector<PrintedLine> lines;
  /// 1-based output line of every printed statement.
  std::unordered_map<const Stmt*, int> stmt_line;

  std::string text() const;
};

PrintedUnit print_lines(const SourceUnit& unit);

}  // namespace regsentry::minic
