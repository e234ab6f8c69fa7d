#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace regsentry::minic {

/// Location of a node in the original source. `file` indexes
/// SourceUnit::files; lines and columns are 1-based.
struct Span {
  int file = 0;
  int line = 0;
  int column = 0;
};

/// Type of a value. Every value is laid out as a flat vector of int slots:
/// one slot for `int`, one per field for a record, one per element for an
/// array.
struct TypeTag {
  enum class Kind { Int, Record, Array, Void };

  Kind kind = Kind::Int;
  std::string record;  // Record
  int length = 0;      // Array

  static TypeTag integer() { return {}; }
  static TypeTag void_type() { return {Kind::Void, {}, 0}; }
  static TypeTag record_of(std::string name) { return {Kind::Record, std::move(name), 0}; }
  static TypeTag array_of(int length) { return {Kind::Array, {}, length}; }

  bool is_int() const { return kind == Kind::Int; }
  bool is_void() const { return kind == Kind::Void; }
  bool is_record() const { return kind == Kind::Record; }
  bool is_array() const { return kind == Kind::Array; }

  friend bool operator==(const TypeTag&, const TypeTag&) = default;
};

std::string to_string(const TypeTag& type);

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* spelling(UnaryOp op);
const char* spelling(BinaryOp op);

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<Expr>;
using StmtPtr = std::shared_ptr<Stmt>;

struct Expr {
  enum class Kind { IntLit, Var, Field, Index, Unary, Binary, Call };

  Kind kind = Kind::IntLit;
  Span span;
  std::int64_t value = 0;      // IntLit
  std::string name;            // Var, Field/Index base variable, Call callee
  std::string field;           // Field
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<ExprPtr> operands;  // Index: [index]; Unary: [x]; Binary: [lhs, rhs]; Call: args

  // Filled in by the analyzer.
  TypeTag type;
  int field_index = -1;
};

struct Stmt {
  enum class Kind { Decl, Assign, If, While, Return, ExprStmt, Block, Assume, Assert };

  Kind kind = Kind::Block;
  Span span;

  // Decl
  std::string name;
  TypeTag decl_type;
  ExprPtr init;                    // `= expr`, may be null
  std::vector<ExprPtr> init_list;  // `= { ... }`
  bool has_init_list = false;

  // Assign: target is a Var, Field or Index expression
  ExprPtr target;
  // Assign value; Return value (null for `return;`); If/While/Assume/Assert
  // condition; ExprStmt call
  ExprPtr expr;

  std::vector<StmtPtr> body;       // Block, If-then, While body
  std::vector<StmtPtr> else_body;  // If
  bool has_else = false;

  // While: loop ordinal in preorder. Assert: index of the asserted property.
  int ordinal = -1;
  // Inserted by instrumentation, not present in the original program.
  bool synthetic = false;
};

struct Param {
  std::string name;
  TypeTag type;
  Span span;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  TypeTag return_type;
  std::vector<StmtPtr> body;
  Span span;
};

struct RecordDecl {
  std::string name;
  std::vector<std::string> fields;
  Span span;

  int field_index(const std::string& field) const;
};

struct SourceFile {
  std::string path;
  std::string text;
};

struct SourceUnit {
  std::vector<SourceFile> files;
  std::vector<RecordDecl> records;
  std::vector<FunctionDef> functions;

  const FunctionDef* find_function(const std::string& name) const;
  const RecordDecl* find_record(const std::string& name) const;
};

ExprPtr clone(const ExprPtr& e);
StmtPtr clone(const StmtPtr& s);
FunctionDef clone(const FunctionDef& f);
SourceUnit clone(const SourceUnit& unit);

/// Structural equality ignoring spans and analyzer annotations.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const FunctionDef& a, const FunctionDef& b);
bool structurally_equal(const SourceUnit& a, const SourceUnit& b);

/// Visits every call expression below the given statements.
template <typename Fn>
void for_each_call(const std::vector<StmtPtr>& stmts, Fn&& fn);

namespace detail {
template <typename Fn>
void for_each_call_expr(const ExprPtr& e, Fn& fn) {
  if (!e) return;
  if (e->kind == Expr::Kind::Call) fn(*e);
  for (const auto& op : e->operands) for_each_call_expr(op, fn);
}
template <typename Fn>
void for_each_call_stmts(const std::vector<StmtPtr>& stmts, Fn& fn) {
  for (const auto& s : stmts) {
    for_each_call_expr(s->init, fn);
    for (const auto& e : s->init_list) for_each_call_expr(e, fn);
    for_each_call_expr(s->target, fn);
    for_each_call_expr(s->expr, fn);
    for_each_call_stmts(s->body, fn);
    for_each_call_stmts(s->else_body, fn);
  }
}
}  // namespace detail

template <typename Fn>
void for_each_call(const std::vector<StmtPtr>& stmts, Fn&& fn) {
  detail::for_each_call_stmts(stmts, fn);
}

}  // namespace regsentry::minic
