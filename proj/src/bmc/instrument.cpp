#include "regsentry/bmc/instrument.hpp"

#include <algorithm>
#include <cctype>

#include "regsentry/error.hpp"

namespace regsentry::bmc {

using minic::BinaryOp;
using minic::Expr;
using minic::ExprPtr;
using minic::Span;
using minic::Stmt;
using minic::StmtPtr;

namespace {

constexpr const char* kTempPrefix = "__ret";

ExprPtr make_expr(Expr::Kind kind, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->span = span;
  return e;
}

ExprPtr literal(minic::Value c, Span span) {
  if (c >= 0) {
    auto e = make_expr(Expr::Kind::IntLit, span);
    e->value = c;
    return e;
  }
  auto e = make_expr(Expr::Kind::Unary, span);
  e->unary_op = minic::UnaryOp::Neg;
  e->operands.push_back(literal(-c, span));
  return e;
}

ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  auto e = make_expr(Expr::Kind::Binary, a->span);
  e->binary_op = op;
  e->operands = {std::move(a), std::move(b)};
  return e;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

ExprPtr variable_expr(const std::string& flat, const minic::PointInfo& point,
                      const std::string& result_name, Span span) {
  const minic::SchemaVar* sv = point.find(flat);
  if (!sv) throw PointMismatch("variable '" + flat + "' is not observed at " + to_string(point.point));
  const std::string base = sv->variable == "return" ? result_name : sv->variable;
  if (sv->name == sv->variable) {
    auto e = make_expr(Expr::Kind::Var, span);
    e->name = base;
    return e;
  }
  const std::string suffix = sv->name.substr(sv->variable.size() + 1);
  if (all_digits(suffix)) {
    auto e = make_expr(Expr::Kind::Index, span);
    e->name = base;
    e->operands.push_back(literal(sv->slot, span));
    return e;
  }
  auto e = make_expr(Expr::Kind::Field, span);
  e->name = base;
  e->field = suffix;
  return e;
}

struct FunctionProps {
  std::vector<std::size_t> entry;
  std::vector<std::size_t> exit;
  std::map<int, std::vector<std::size_t>> loops;
};

class Rewriter {
 public:
  Rewriter(const minic::AnalyzedUnit& unit, const minic::FunctionDef& f, const FunctionProps& props,
           const std::vector<infer::Property>& all)
      : unit_(unit), f_(f), props_(props), all_(all) {}

  void run(minic::FunctionDef& out) {
    std::vector<StmtPtr> body = rewrite(out.body);
    if (f_.return_type.is_void() && !props_.exit.empty() && !minic::definitely_returns(body))
      add_asserts(body, props_.exit, "", out.body.empty() ? f_.span : out.body.back()->span);
    std::vector<StmtPtr> head;
    add_asserts(head, props_.entry, "", f_.span);
    body.insert(body.begin(), head.begin(), head.end());
    out.body = std::move(body);
  }

 private:
  void add_asserts(std::vector<StmtPtr>& out, const std::vector<std::size_t>& indices,
                   const std::string& result_name, Span anchor) {
    for (std::size_t idx : indices) {
      const infer::Property& p = all_[idx];
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::Assert;
      s->span = anchor;
      s->synthetic = true;
      s->ordinal = static_cast<int>(idx);
      s->expr = formula_expr(p.formula, *unit_.point(p.point), result_name);
      out.push_back(std::move(s));
    }
  }

  std::vector<StmtPtr> rewrite(const std::vector<StmtPtr>& in) {
    std::vector<StmtPtr> out;
    for (const StmtPtr& s : in) {
      switch (s->kind) {
        case Stmt::Kind::While: {
          s->body = rewrite(s->body);
          auto it = props_.loops.find(s->ordinal);
          if (it == props_.loops.end()) {
            out.push_back(s);
            break;
          }
          add_asserts(out, it->second, "", s->span);
          std::vector<StmtPtr> head;
          add_asserts(head, it->second, "", s->span);
          s->body.insert(s->body.begin(), head.begin(), head.end());
          out.push_back(s);
          add_asserts(out, it->second, "", s->span);
          break;
        }
        case Stmt::Kind::If:
          s->body = rewrite(s->body);
          s->else_body = rewrite(s->else_body);
          out.push_back(s);
          break;
        case Stmt::Kind::Block:
          s->body = rewrite(s->body);
          out.push_back(s);
          break;
        case Stmt::Kind::Return:
          if (props_.exit.empty()) {
            out.push_back(s);
          } else if (!s->expr) {
            add_asserts(out, props_.exit, "", s->span);
            out.push_back(s);
          } else {
            const std::string temp = kTempPrefix + std::to_string(temp_counter_++);
            auto decl = std::make_shared<Stmt>();
            decl->kind = Stmt::Kind::Decl;
            decl->span = s->span;
            decl->synthetic = true;
            decl->name = temp;
            decl->decl_type = f_.return_type;
            decl->init = s->expr;
            out.push_back(decl);
            add_asserts(out, props_.exit, temp, s->span);
            auto ref = make_expr(Expr::Kind::Var, s->expr->span);
            ref->name = temp;
            s->expr = ref;
            out.push_back(s);
          }
          break;
        default: out.push_back(s); break;
      }
    }
    return out;
  }

  const minic::AnalyzedUnit& unit_;
  const minic::FunctionDef& f_;
  const FunctionProps& props_;
  const std::vector<infer::Property>& all_;
  int temp_counter_ = 0;
};

bool same_span(const Span& a, const Span& b) {
  return a.file == b.file && a.line == b.line && a.column == b.column;
}

void strip_list(std::vector<StmtPtr>& stmts) {
  std::vector<StmtPtr> out;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    StmtPtr s = stmts[i];
    if (s->synthetic && s->kind == Stmt::Kind::Assert) continue;
    if (s->synthetic && s->kind == Stmt::Kind::Decl && s->name.rfind(kTempPrefix, 0) == 0) {
      std::size_t j = i + 1;
      while (j < stmts.size() && stmts[j]->synthetic && stmts[j]->kind == Stmt::Kind::Assert) ++j;
      if (j < stmts.size() && stmts[j]->kind == Stmt::Kind::Return && stmts[j]->expr &&
          stmts[j]->expr->kind == Expr::Kind::Var && stmts[j]->expr->name == s->name) {
        stmts[j]->expr = s->init;
        continue;
      }
    }
    strip_list(s->body);
    strip_list(s->else_body);
    out.push_back(s);
  }
  stmts = std::move(out);
}

}  // namespace

bool mappable(const infer::Property& p, const minic::AnalyzedUnit& unit) {
  const minic::PointInfo* info = unit.point(p.point);
  if (!info) return false;
  for (const auto& v : p.formula.variables())
    if (!info->find(v)) return false;
  return true;
}

ExprPtr formula_expr(const infer::Formula& f, const minic::PointInfo& point,
                     const std::string& result_name) {
  Span span;
  auto v = [&](const std::string& name) { return variable_expr(name, point, result_name, span); };
  switch (f.kind) {
    case infer::Template::EqConst: return binary(BinaryOp::Eq, v(f.var), literal(f.constant, span));
    case infer::Template::LowerBound: return binary(BinaryOp::Ge, v(f.var), literal(f.constant, span));
    case infer::Template::UpperBound: return binary(BinaryOp::Le, v(f.var), literal(f.constant, span));
    case infer::Template::NonZero: return binary(BinaryOp::Ne, v(f.var), literal(0, span));
    case infer::Template::OneOf: {
      ExprPtr acc;
      for (minic::Value c : f.set) {
        ExprPtr eq = binary(BinaryOp::Eq, v(f.var), literal(c, span));
        acc = acc ? binary(BinaryOp::Or, acc, eq) : eq;
      }
      return acc;
    }
    case infer::Template::RelVarVar: {
      BinaryOp op = BinaryOp::Eq;
      switch (f.op) {
        case infer::RelOp::Eq: op = BinaryOp::Eq; break;
        case infer::RelOp::Ne: op = BinaryOp::Ne; break;
        case infer::RelOp::Ge: op = BinaryOp::Ge; break;
        case infer::RelOp::Le: op = BinaryOp::Le; break;
      }
      return binary(op, v(f.var), v(f.other));
    }
    case infer::Template::OffsetEq: {
      ExprPtr rhs = f.constant >= 0 ? binary(BinaryOp::Add, v(f.other), literal(f.constant, span))
                                    : binary(BinaryOp::Sub, v(f.other), literal(-f.constant, span));
      return binary(BinaryOp::Eq, v(f.var), rhs);
    }
  }
  return literal(1, span);
}

OriginalLine InstrumentedUnit::original_line(int printed_line) const {
  if (printed_line < 1 || printed_line > static_cast<int>(line_map.size())) return {};
  return line_map[static_cast<std::size_t>(printed_line - 1)];
}

int InstrumentedUnit::line_of(const Stmt& s) const {
  auto it = printed.stmt_line.find(&s);
  return it == printed.stmt_line.end() ? 0 : it->second;
}

InstrumentedUnit instrument(const minic::AnalyzedUnit& unit, const std::vector<infer::Property>& props) {
  InstrumentedUnit iu;
  iu.original = &unit;
  iu.properties = props;

  std::map<std::string, FunctionProps> by_function;
  for (std::size_t i = 0; i < props.size(); ++i) {
    const infer::Property& p = props[i];
    if (!mappable(p, unit)) {
      iu.unmappable.push_back(i);
      continue;
    }
    FunctionProps& fp = by_function[p.point.function];
    switch (p.point.kind) {
      case minic::PointKind::Entry: fp.entry.push_back(i); break;
      case minic::PointKind::Exit: fp.exit.push_back(i); break;
      case minic::PointKind::Loop: fp.loops[p.point.ordinal].push_back(i); break;
    }
  }

  minic::SourceUnit copy = minic::clone(unit.unit());
  for (auto& f : copy.functions) {
    auto it = by_function.find(f.name);
    if (it == by_function.end()) continue;
    Rewriter(unit, unit.function(f.name), it->second, props).run(f);
  }
  iu.unit = minic::analyze(std::move(copy));
  iu.printed = minic::print_lines(iu.unit.unit());

  const auto& lines = iu.printed.lines;
  iu.line_map.assign(lines.size(), OriginalLine{});
  std::optional<OriginalLine> next;
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (lines[i].origin && !lines[i].synthetic) next = OriginalLine{lines[i].origin->file, lines[i].origin->line};
    // Inserted statements carry the span of the construct they check.
    if (lines[i].origin && lines[i].synthetic)
      iu.line_map[i] = OriginalLine{lines[i].origin->file, lines[i].origin->line};
    else if (next)
      iu.line_map[i] = *next;
  }
  // Lines after the last original statement map back to it.
  std::optional<OriginalLine> last;
  std::size_t tail = 0;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].origin && !lines[i].synthetic) {
      last = OriginalLine{lines[i].origin->file, lines[i].origin->line};
      tail = i + 1;
    }
  if (last)
    for (std::size_t i = tail; i < lines.size(); ++i)
      if (!lines[i].origin) iu.line_map[i] = *last;

  for (const auto& f : iu.unit.unit().functions)
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i].origin && !lines[i].synthetic && same_span(*lines[i].origin, f.span)) {
        iu.function_line[f.name] = static_cast<int>(i) + 1;
        break;
      }
  return iu;
}

minic::SourceUnit strip(const InstrumentedUnit& iu) {
  minic::SourceUnit out = minic::clone(iu.unit.unit());
  for (auto& f : out.functions) strip_list(f.body);
  return out;
}

}  // namespace regsentry::bmc
