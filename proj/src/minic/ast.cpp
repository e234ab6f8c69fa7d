#include "regsentry/minic/ast.hpp"

#include <algorithm>

namespace regsentry::minic {

std::string to_string(const TypeTag& type) {
  switch (type.kind) {
    case TypeTag::Kind::Int: return "int";
    case TypeTag::Kind::Void: return "void";
    case TypeTag::Kind::Record: return type.record;
    case TypeTag::Kind::Array: return "int[" + std::to_string(type.length) + "]";
  }
  return "?";
}

const char* spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

const char* spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

int RecordDecl::field_index(const std::string& field) const {
  auto it = std::find(fields.begin(), fields.end(), field);
  return it == fields.end() ? -1 : static_cast<int>(it - fields.begin());
}

const FunctionDef* SourceUnit::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const RecordDecl* SourceUnit::find_record(const std::string& name) const {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

std::vector<StmtPtr> clone_all(const std::vector<StmtPtr>& stmts) {
  std::vector<StmtPtr> out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) out.push_back(clone(s));
  return out;
}

bool equal_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(*a[i], *b[i])) return false;
  return true;
}

bool equal_opt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool equal_stmts(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

ExprPtr clone(const ExprPtr& e) {
  if (!e) return nullptr;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& op : copy->operands) op = clone(op);
  return copy;
}

StmtPtr clone(const StmtPtr& s) {
  if (!s) return nullptr;
  auto copy = std::make_shared<Stmt>(*s);
  copy->init = clone(s->init);
  for (auto& e : copy->init_list) e = clone(e);
  copy->target = clone(s->target);
  copy->expr = clone(s->expr);
  copy->body = clone_all(s->body);
  copy->else_body = clone_all(s->else_body);
  return copy;
}

FunctionDef clone(const FunctionDef& f) {
  FunctionDef copy = f;
  copy.body = clone_all(f.body);
  return copy;
}

SourceUnit clone(const SourceUnit& unit) {
  SourceUnit copy;
  copy.files = unit.files;
  copy.records = unit.records;
  for (const auto& f : unit.functions) copy.functions.push_back(clone(f));
  return copy;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit: return a.value == b.value;
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::Field: return a.name == b.name && a.field == b.field;
    case Expr::Kind::Index: return a.name == b.name && equal_exprs(a.operands, b.operands);
    case Expr::Kind::Unary:
      return a.unary_op == b.unary_op && equal_exprs(a.operands, b.operands);
    case Expr::Kind::Binary:
      return a.binary_op == b.binary_op && equal_exprs(a.operands, b.operands);
    case Expr::Kind::Call: return a.name == b.name && equal_exprs(a.operands, b.operands);
  }
  return false;
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Decl:
      return a.name == b.name && a.decl_type == b.decl_type && equal_opt(a.init, b.init) &&
             a.has_init_list == b.has_init_list && equal_exprs(a.init_list, b.init_list);
    case Stmt::Kind::Assign: return equal_opt(a.target, b.target) && equal_opt(a.expr, b.expr);
    case Stmt::Kind::If:
      return equal_opt(a.expr, b.expr) && equal_stmts(a.body, b.body) &&
             a.has_else == b.has_else && equal_stmts(a.else_body, b.else_body);
    case Stmt::Kind::While: return equal_opt(a.expr, b.expr) && equal_stmts(a.body, b.body);
    case Stmt::Kind::Return:
    case Stmt::Kind::ExprStmt:
    case Stmt::Kind::Assume:
    case Stmt::Kind::Assert: return equal_opt(a.expr, b.expr);
    case Stmt::Kind::Block: return equal_stmts(a.body, b.body);
  }
  return false;
}

bool structurally_equal(const FunctionDef& a, const FunctionDef& b) {
  if (a.name != b.name || !(a.return_type == b.return_type)) return false;
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name || !(a.params[i].type == b.params[i].type))
      return false;
  return equal_stmts(a.body, b.body);
}

bool structurally_equal(const SourceUnit& a, const SourceUnit& b) {
  if (a.records.size() != b.records.size() || a.functions.size() != b.functions.size())
    return false;
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].name != b.records[i].name || a.records[i].fields != b.records[i].fields)
      return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i)
    if (!structurally_equal(a.functions[i], b.functions[i])) return false;
  return true;
}

}  // namespace regsentry::minic
