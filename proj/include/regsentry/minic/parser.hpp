#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "regsentry/minic/ast.hpp"

namespace regsentry::minic {

struct ParseOptions {
  std::string path = "<input>";
  /// Harness files may use `assume(e);` and `assert(e);` and reserved
  /// `__` identifiers.
  bool harness = false;
};

/// Parses one MiniC file. The first syntax error throws ParseError.
SourceUnit parse(std::string_view text, const ParseOptions& options = {});

SourceUnit parse_file(const std::string& path, const ParseOptions& options = {});

/// Parses a standalone expression. With `allow_return`, the keyword
/// `return` is read as the pseudo-variable naming a function result.
ExprPtr parse_expression(std::string_view text, bool allow_return = false);

/// Concatenates units, keeping file indices in spans consistent.
SourceUnit merge(std::vector<SourceUnit> units);

}  // namespace regsentry::minic
