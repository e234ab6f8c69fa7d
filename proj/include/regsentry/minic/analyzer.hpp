#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "regsentry/minic/ast.hpp"

namespace regsentry::minic {

enum class PointKind { Entry, Loop, Exit };

/// Structural anchor of a property. Identity is version independent.
struct ProgramPoint {
  std::string function;
  PointKind kind = PointKind::Entry;
  int ordinal = 0;  // loop index in preorder; 0 for ENTRY/EXIT

  static ProgramPoint entry(std::string f) { return {std::move(f), PointKind::Entry, 0}; }
  static ProgramPoint exit(std::string f) { return {std::move(f), PointKind::Exit, 0}; }
  static ProgramPoint loop(std::string f, int k) { return {std::move(f), PointKind::Loop, k}; }

  friend auto operator<=>(const ProgramPoint&, const ProgramPoint&) = default;
};

const char* to_string(PointKind kind);
/// `f ENTRY`, `f EXIT` or `f LOOP k`.
std::string to_string(const ProgramPoint& point);

/// A traced scalar: flattened name such as `total`, `prod.items`, `arr.3`
/// or `return`, and where it lives inside the owning variable.
struct SchemaVar {
  std::string name;
  std::string variable;
  int slot = 0;

  friend bool operator==(const SchemaVar&, const SchemaVar&) = default;
};

struct PointInfo {
  ProgramPoint point;
  std::vector<SchemaVar> variables;

  const SchemaVar* find(const std::string& name) const;
};

/// Maximum number of array elements exposed to tracing.
inline constexpr int kTracedArrayElements = 8;

class CallGraph {
 public:
  void add_node(const std::string& f) { nodes_.insert(f); }
  void add_edge(const std::string& caller, const std::string& callee) {
    edges_.insert({caller, callee});
  }

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }
  bool contains(const std::string& f) const { return nodes_.count(f) != 0; }

  std::set<std::string> callers(const std::string& g) const;
  std::set<std::string> callees(const std::string& f) const;

 private:
  std::set<std::string> nodes_;
  std::set<std::pair<std::string, std::string>> edges_;
};

/// Exact syntactic caller set; throws UnknownFunction when g is not a node.
std::set<std::string> callers_of(const std::string& g, const CallGraph& cg);

struct FunctionInfo {
  /// ENTRY, LOOP(0..n-1), EXIT in that order.
  std::vector<PointInfo> points;
  int loop_count = 0;
};

/// Type-checked unit with call graph and program-point schemas. Immutable
/// after construction.
class AnalyzedUnit {
 public:
  const SourceUnit& unit() const { return unit_; }
  const CallGraph& call_graph() const { return call_graph_; }

  const FunctionDef& function(const std::string& name) const;
  const FunctionDef* find_function(const std::string& name) const { return unit_.find_function(name); }
  const RecordDecl& record(const std::string& name) const;
  const FunctionInfo& info(const std::string& function) const;
  const PointInfo* point(const ProgramPoint& point) const;
  std::vector<const PointInfo*> all_points() const;

  /// Number of int slots in a value of the given type.
  int slot_count(const TypeTag& type) const;
  /// Flattened traced names of a variable of the given type.
  std::vector<SchemaVar> flatten(const std::string& name, const TypeTag& type) const;

  /// Source line text (without trailing newline) of file `file`, 1-based.
  std::string source_line(int file, int line) const;

 private:
  friend AnalyzedUnit analyze(SourceUnit unit);

  SourceUnit unit_;
  CallGraph call_graph_;
  std::map<std::string, FunctionInfo> info_;
  std::vector<std::vector<std::string>> file_lines_;
};

/// Resolves names, checks types and arities, rejects recursion, builds the
/// call graph and enumerates program points. Throws SemanticError.
AnalyzedUnit analyze(SourceUnit unit);

/// True when every control path through `stmts` ends in a return.
bool definitely_returns(const std::vector<StmtPtr>& stmts);

}  // namespace regsentry::minic
