#include "regsentry/minic/analyzer.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "regsentry/error.hpp"

namespace regsentry::minic {

const char* to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Entry: return "ENTRY";
    case PointKind::Loop: return "LOOP";
    case PointKind::Exit: return "EXIT";
  }
  return "?";
}

std::string to_string(const ProgramPoint& point) {
  std::string out = point.function + " " + to_string(point.kind);
  if (point.kind == PointKind::Loop) out += " " + std::to_string(point.ordinal);
  return out;
}

const SchemaVar* PointInfo::find(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::set<std::string> CallGraph::callers(const std::string& g) const {
  std::set<std::string> out;
  for (const auto& [caller, callee] : edges_)
    if (callee == g) out.insert(caller);
  return out;
}

std::set<std::string> CallGraph::callees(const std::string& f) const {
  std::set<std::string> out;
  for (const auto& [caller, callee] : edges_)
    if (caller == f) out.insert(callee);
  return out;
}

std::set<std::string> callers_of(const std::string& g, const CallGraph& cg) {
  if (!cg.contains(g)) throw UnknownFunction(g);
  return cg.callers(g);
}

const FunctionDef& AnalyzedUnit::function(const std::string& name) const {
  const FunctionDef* f = unit_.find_function(name);
  if (!f) throw UnknownFunction(name);
  return *f;
}

const RecordDecl& AnalyzedUnit::record(const std::string& name) const {
  const RecordDecl* r = unit_.find_record(name);
  if (!r) throw SemanticError(SemanticError::Kind::UndefinedName, "unknown record '" + name + "'");
  return *r;
}

const FunctionInfo& AnalyzedUnit::info(const std::string& function) const {
  auto it = info_.find(function);
  if (it == info_.end()) throw UnknownFunction(function);
  return it->second;
}

const PointInfo* AnalyzedUnit::point(const ProgramPoint& point) const {
  auto it = info_.find(point.function);
  if (it == info_.end()) return nullptr;
  for (const auto& p : it->second.points)
    if (p.point == point) return &p;
  return nullptr;
}

std::vector<const PointInfo*> AnalyzedUnit::all_points() const {
  std::vector<const PointInfo*> out;
  for (const auto& f : unit_.functions)
    for (const auto& p : info_.at(f.name).points) out.push_back(&p);
  return out;
}

int AnalyzedUnit::slot_count(const TypeTag& type) const {
  switch (type.kind) {
    case TypeTag::Kind::Int: return 1;
    case TypeTag::Kind::Void: return 0;
    case TypeTag::Kind::Array: return type.length;
    case TypeTag::Kind::Record: return static_cast<int>(record(type.record).fields.size());
  }
  return 0;
}

std::vector<SchemaVar> AnalyzedUnit::flatten(const std::string& name, const TypeTag& type) const {
  std::vector<SchemaVar> out;
  switch (type.kind) {
    case TypeTag::Kind::Int: out.push_back({name, name, 0}); break;
    case TypeTag::Kind::Void: break;
    case TypeTag::Kind::Array:
      for (int i = 0; i < std::min(type.length, kTracedArrayElements); ++i)
        out.push_back({name + "." + std::to_string(i), name, i});
      break;
    case TypeTag::Kind::Record: {
      const auto& fields = record(type.record).fields;
      for (std::size_t i = 0; i < fields.size(); ++i)
        out.push_back({name + "." + fields[i], name, static_cast<int>(i)});
      break;
    }
  }
  return out;
}

std::string AnalyzedUnit::source_line(int file, int line) const {
  if (file < 0 || file >= static_cast<int>(file_lines_.size())) return {};
  const auto& lines = file_lines_[static_cast<std::size_t>(file)];
  if (line < 1 || line > static_cast<int>(lines.size())) return {};
  return lines[static_cast<std::size_t>(line - 1)];
}

bool definitely_returns(const std::vector<StmtPtr>& stmts) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case Stmt::Kind::Return: return true;
      case Stmt::Kind::Block:
        if (definitely_returns(s->body)) return true;
        break;
      case Stmt::Kind::If:
        if (s->has_else && definitely_returns(s->body) && definitely_returns(s->else_body))
          return true;
        break;
      default: break;
    }
  }
  return false;
}

namespace {

using Kind = SemanticError::Kind;

[[noreturn]] void error(Kind kind, const std::string& message, const Span& span) {
  throw SemanticError(kind, message, span.line);
}

bool contains_return(const Stmt& s) {
  if (s.kind == Stmt::Kind::Return) return true;
  for (const auto& c : s.body)
    if (contains_return(*c)) return true;
  for (const auto& c : s.else_body)
    if (contains_return(*c)) return true;
  return false;
}

struct Local {
  std::string name;
  TypeTag type;
};

class FunctionChecker {
 public:
  FunctionChecker(const SourceUnit& unit, const AnalyzedUnit& au, FunctionDef& fn)
      : unit_(unit), au_(au), fn_(fn) {}

  FunctionInfo run() {
    scopes_.emplace_back();
    for (const auto& p : fn_.params) {
      check_type(p.type, p.span);
      declare(p.name, p.type, p.span);
    }
    PointInfo entry{ProgramPoint::entry(fn_.name), {}};
    for (const auto& p : fn_.params)
      for (auto& v : au_.flatten(p.name, p.type)) entry.variables.push_back(v);

    std::vector<Local> exit_locals;
    bool seen_return = false;
    for (auto& s : fn_.body) {
      if (!seen_return && contains_return(*s)) seen_return = true;
      statement(*s);
      if (!seen_return && s->kind == Stmt::Kind::Decl) exit_locals.push_back({s->name, s->decl_type});
    }

    if (!fn_.return_type.is_void() && !definitely_returns(fn_.body))
      error(Kind::MissingReturn, "function '" + fn_.name + "' may end without returning a value",
            fn_.span);

    PointInfo exit{ProgramPoint::exit(fn_.name), entry.variables};
    for (const auto& l : exit_locals)
      for (auto& v : au_.flatten(l.name, l.type)) exit.variables.push_back(v);
    if (!fn_.return_type.is_void())
      for (auto& v : au_.flatten("return", fn_.return_type)) exit.variables.push_back(v);

    FunctionInfo info;
    info.loop_count = next_loop_;
    info.points.push_back(std::move(entry));
    for (auto& l : loops_) info.points.push_back(std::move(l));
    info.points.push_back(std::move(exit));
    return info;
  }

 private:
  void check_type(const TypeTag& t, const Span& span) {
    if (t.is_record() && !unit_.find_record(t.record))
      error(Kind::UndefinedName, "unknown record type '" + t.record + "'", span);
    if (t.is_array() && t.length < 1)
      error(Kind::BadArrayLength, "array length must be at least 1", span);
    if (t.is_array() && t.length > 4096)
      error(Kind::BadArrayLength, "array length exceeds 4096", span);
  }

  const TypeTag* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      for (const auto& l : *it)
        if (l.name == name) return &l.type;
    return nullptr;
  }

  void declare(const std::string& name, const TypeTag& type, const Span& span) {
    if (lookup(name)) error(Kind::Redefinition, "'" + name + "' is already declared", span);
    scopes_.back().push_back({name, type});
  }

  void block(std::vector<StmtPtr>& stmts) {
    scopes_.emplace_back();
    for (auto& s : stmts) statement(*s);
    scopes_.pop_back();
  }

  void expect_int(Expr& e) {
    TypeTag t = expression(e);
    if (!t.is_int())
      error(Kind::TypeMismatch, "expected int, found " + to_string(t) + " in '" + fn_.name + "'",
            e.span);
  }

  void expect_type(Expr& e, const TypeTag& want) {
    TypeTag t = expression(e);
    if (!(t == want))
      error(Kind::TypeMismatch, "expected " + to_string(want) + ", found " + to_string(t), e.span);
  }

  std::vector<Local> in_scope() const {
    std::vector<Local> out;
    for (const auto& scope : scopes_)
      for (const auto& l : scope) out.push_back(l);
    return out;
  }

  void statement(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Decl: {
        check_type(s.decl_type, s.span);
        if (s.init) {
          expect_type(*s.init, s.decl_type);
        } else if (s.has_init_list) {
          if (s.decl_type.is_int())
            error(Kind::TypeMismatch, "brace initializer on int variable '" + s.name + "'", s.span);
          int want = au_.slot_count(s.decl_type);
          if (static_cast<int>(s.init_list.size()) != want)
            error(Kind::ArityMismatch,
                  "initializer for '" + s.name + "' needs " + std::to_string(want) + " values",
                  s.span);
          for (auto& e : s.init_list) expect_int(*e);
        } else if (s.decl_type.is_int()) {
          error(Kind::Misplaced, "int variable '" + s.name + "' needs an initializer", s.span);
        }
        declare(s.name, s.decl_type, s.span);
        break;
      }
      case Stmt::Kind::Assign: {
        TypeTag t = expression(*s.target);
        expect_type(*s.expr, t);
        break;
      }
      case Stmt::Kind::If:
        expect_int(*s.expr);
        block(s.body);
        if (s.has_else) block(s.else_body);
        break;
      case Stmt::Kind::While: {
        s.ordinal = next_loop_++;
        std::size_t slot = loops_.size();
        loops_.push_back(PointInfo{ProgramPoint::loop(fn_.name, s.ordinal), {}});
        for (const auto& l : in_scope())
          for (auto& v : au_.flatten(l.name, l.type)) loops_[slot].variables.push_back(v);
        expect_int(*s.expr);
        block(s.body);
        break;
      }
      case Stmt::Kind::Return:
        if (fn_.return_type.is_void()) {
          if (s.expr)
            error(Kind::TypeMismatch, "void function '" + fn_.name + "' returns a value", s.span);
        } else {
          if (!s.expr)
            error(Kind::TypeMismatch, "function '" + fn_.name + "' must return a value", s.span);
          expect_type(*s.expr, fn_.return_type);
        }
        break;
      case Stmt::Kind::ExprStmt:
        if (s.expr->kind != Expr::Kind::Call)
          error(Kind::Misplaced, "expression statement must be a call", s.span);
        call(*s.expr, true);
        break;
      case Stmt::Kind::Block: block(s.body); break;
      case Stmt::Kind::Assume:
      case Stmt::Kind::Assert: expect_int(*s.expr); break;
    }
  }

  TypeTag call(Expr& e, bool statement_position) {
    const FunctionDef* callee = unit_.find_function(e.name);
    if (!callee) error(Kind::UndefinedName, "call to undefined function '" + e.name + "'", e.span);
    if (callee->params.size() != e.operands.size())
      error(Kind::ArityMismatch,
            "'" + e.name + "' expects " + std::to_string(callee->params.size()) +
                " arguments, got " + std::to_string(e.operands.size()),
            e.span);
    for (std::size_t i = 0; i < e.operands.size(); ++i)
      expect_type(*e.operands[i], callee->params[i].type);
    if (callee->return_type.is_void() && !statement_position)
      error(Kind::TypeMismatch, "void function '" + e.name + "' used as a value", e.span);
    return callee->return_type;
  }

  TypeTag expression(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        if (e.value > 0x7fffffff) error(Kind::TypeMismatch, "integer literal out of range", e.span);
        e.type = TypeTag::integer();
        break;
      case Expr::Kind::Var: {
        const TypeTag* t = lookup(e.name);
        if (!t) error(Kind::UndefinedName, "undefined variable '" + e.name + "'", e.span);
        e.type = *t;
        break;
      }
      case Expr::Kind::Field: {
        const TypeTag* t = lookup(e.name);
        if (!t) error(Kind::UndefinedName, "undefined variable '" + e.name + "'", e.span);
        if (!t->is_record())
          error(Kind::TypeMismatch, "'" + e.name + "' is not a record", e.span);
        e.field_index = au_.record(t->record).field_index(e.field);
        if (e.field_index < 0)
          error(Kind::UndefinedName, "record '" + t->record + "' has no field '" + e.field + "'",
                e.span);
        e.type = TypeTag::integer();
        break;
      }
      case Expr::Kind::Index: {
        const TypeTag* t = lookup(e.name);
        if (!t) error(Kind::UndefinedName, "undefined variable '" + e.name + "'", e.span);
        if (!t->is_array()) error(Kind::TypeMismatch, "'" + e.name + "' is not an array", e.span);
        expect_int(*e.operands[0]);
        e.type = TypeTag::integer();
        break;
      }
      case Expr::Kind::Unary:
        expect_int(*e.operands[0]);
        e.type = TypeTag::integer();
        break;
      case Expr::Kind::Binary:
        expect_int(*e.operands[0]);
        expect_int(*e.operands[1]);
        e.type = TypeTag::integer();
        break;
      case Expr::Kind::Call: e.type = call(e, false); break;
    }
    return e.type;
  }

  const SourceUnit& unit_;
  const AnalyzedUnit& au_;
  FunctionDef& fn_;
  std::vector<std::vector<Local>> scopes_;
  std::vector<PointInfo> loops_;
  int next_loop_ = 0;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

AnalyzedUnit analyze(SourceUnit unit) {
  AnalyzedUnit au;
  au.unit_ = std::move(unit);
  SourceUnit& u = au.unit_;

  std::set<std::string> seen;
  for (const auto& r : u.records) {
    if (!seen.insert(r.name).second)
      error(Kind::Redefinition, "record '" + r.name + "' defined twice", r.span);
    if (r.fields.empty()) error(Kind::Misplaced, "record '" + r.name + "' has no fields", r.span);
    std::set<std::string> fields;
    for (const auto& f : r.fields)
      if (!fields.insert(f).second)
        error(Kind::Redefinition, "duplicate field '" + f + "' in record '" + r.name + "'", r.span);
  }
  seen.clear();
  for (const auto& f : u.functions)
    if (!seen.insert(f.name).second)
      error(Kind::Redefinition, "function '" + f.name + "' defined twice", f.span);

  for (auto& f : u.functions) {
    if (f.return_type.is_record() && !u.find_record(f.return_type.record))
      error(Kind::UndefinedName, "unknown record type '" + f.return_type.record + "'", f.span);
  }
  for (auto& f : u.functions) au.info_[f.name] = FunctionChecker(u, au, f).run();

  for (const auto& f : u.functions) {
    au.call_graph_.add_node(f.name);
    for_each_call(f.body, [&](const Expr& call) { au.call_graph_.add_edge(f.name, call.name); });
  }

  // Reject cycles, direct or mutual.
  enum class Mark { None, Active, Done };
  std::map<std::string, Mark> marks;
  std::function<void(const std::string&)> visit = [&](const std::string& f) {
    marks[f] = Mark::Active;
    for (const auto& g : au.call_graph_.callees(f)) {
      if (marks[g] == Mark::Active)
        error(Kind::Recursion, "recursion detected: '" + f + "' calls '" + g + "'",
              u.find_function(f)->span);
      if (marks[g] == Mark::None) visit(g);
    }
    marks[f] = Mark::Done;
  };
  for (const auto& f : u.functions)
    if (marks[f.name] == Mark::None) visit(f.name);

  for (const auto& file : u.files) au.file_lines_.push_back(split_lines(file.text));
  return au;
}

}  // namespace regsentry::minic
