#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regsentry/minic/analyzer.hpp"
#include "regsentry/minic/semantics.hpp"

namespace regsentry::infer {

using minic::Value;

/// Template kinds in canonical output order.
enum class Template { EqConst, LowerBound, UpperBound, NonZero, OneOf, RelVarVar, OffsetEq };
enum class RelOp { Eq, Ne, Ge, Le };

const char* to_string(Template t);
const char* spelling(RelOp op);

/// A template instance over flattened variable names.
///   EqConst     var == constant
///   LowerBound  var >= constant
///   UpperBound  var <= constant
///   NonZero     var != 0
///   OneOf       var == set[0] || var == set[1] [|| var == set[2]]
///   RelVarVar   var <op> other
///   OffsetEq    var == other + constant
struct Formula {
  Template kind = Template::EqConst;
  std::string var;
  std::string other;
  RelOp op = RelOp::Eq;
  Value constant = 0;
  std::vector<Value> set;

  static Formula eq_const(std::string v, Value c);
  static Formula lower_bound(std::string v, Value c);
  static Formula upper_bound(std::string v, Value c);
  static Formula non_zero(std::string v);
  static Formula one_of(std::string v, std::vector<Value> values);
  static Formula rel(std::string v, RelOp op, std::string w);
  static Formula offset_eq(std::string v, std::string w, Value c);

  std::vector<std::string> variables() const;

  friend auto operator<=>(const Formula&, const Formula&) = default;
  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Evaluates under W-bit signed semantics. `lookup` returns nullopt for an
/// unknown variable, in which case evaluation throws PointMismatch.
bool evaluate(const Formula& f, const std::function<std::optional<Value>(const std::string&)>& lookup,
              int width);

/// MiniC expression syntax, e.g. `total >= 0`, `return == 0 || return == 1`,
/// `arr[2] == n + 1`.
std::string to_text(const Formula& f);
/// Inverse of to_text. Throws ParseError on text that is not a template.
Formula parse_formula(const std::string& text, int width);

/// `arr.3` -> `arr[3]`; other names unchanged.
std::string name_to_text(const std::string& flattened);

enum class Status {
  Dynamic,
  True,
  Discarded,
  Outdated,
  NonRegression,
  Violated,
  Preserved,
  Unchecked,
  Unmappable,
};

const char* to_string(Status s);
std::optional<Status> parse_status(const std::string& s);

struct Property {
  std::string id;
  minic::ProgramPoint point;
  Formula formula;
  Status status = Status::Dynamic;
};

/// Stable 64-bit FNV-1a hash of (point, formula text), in hex.
std::string property_id(const minic::ProgramPoint& point, const Formula& f);
Property make_property(const minic::ProgramPoint& point, Formula f);

/// Canonical order: point, then template kind, then variable names.
bool canonical_less(const Property& a, const Property& b);

/// `<status> <function> <kind> <ordinal?> <formula-text>`
std::string format_property(const Property& p);
Property parse_property(const std::string& line, int width);
std::string format_properties(const std::vector<Property>& props);
std::vector<Property> parse_properties(const std::string& text, int width);

}  // namespace regsentry::infer
