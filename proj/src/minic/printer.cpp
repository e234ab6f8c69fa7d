#include "regsentry/minic/printer.hpp"

#include <sstream>

namespace regsentry::minic {
namespace {

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
  }
  return 0;
}

void emit(std::ostringstream& out, const Expr& e);

void emit_operand(std::ostringstream& out, const Expr& e, int parent_prec, bool right) {
  bool parens = false;
  if (e.kind == Expr::Kind::Binary) {
    int p = precedence(e.binary_op);
    parens = p < parent_prec || (right && p == parent_prec);
  }
  if (parens) out << '(';
  emit(out, e);
  if (parens) out << ')';
}

void emit(std::ostringstream& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      if (e.value < 0)
        out << "(-" << -e.value << ')';
      else
        out << e.value;
      break;
    case Expr::Kind::Var: out << e.name; break;
    case Expr::Kind::Field: out << e.name << '.' << e.field; break;
    case Expr::Kind::Index:
      out << e.name << '[';
      emit(out, *e.operands[0]);
      out << ']';
      break;
    case Expr::Kind::Unary: {
      out << spelling(e.unary_op);
      const Expr& x = *e.operands[0];
      bool parens = x.kind == Expr::Kind::Binary ||
                    (x.kind == Expr::Kind::Unary && e.unary_op == UnaryOp::Neg &&
                     x.unary_op == UnaryOp::Neg) ||
                    (x.kind == Expr::Kind::IntLit && x.value < 0);
      if (parens) out << '(';
      emit(out, x);
      if (parens) out << ')';
      break;
    }
    case Expr::Kind::Binary: {
      int p = precedence(e.binary_op);
      emit_operand(out, *e.operands[0], p, false);
      out << ' ' << spelling(e.binary_op) << ' ';
      emit_operand(out, *e.operands[1], p, true);
      break;
    }
    case Expr::Kind::Call:
      out << e.name << '(';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out << ", ";
        emit(out, *e.operands[i]);
      }
      out << ')';
      break;
  }
}

std::string type_prefix(const TypeTag& t) { return t.is_record() ? t.record : "int"; }

class LinePrinter {
 public:
  PrintedUnit run(const SourceUnit& unit) {
    for (const auto& r : unit.records) {
      line("record " + r.name + " {", r.span);
      for (const auto& f : r.fields) line("  int " + f + ";", std::nullopt);
      line("}", std::nullopt);
      line("", std::nullopt);
    }
    for (const auto& f : unit.functions) {
      std::ostringstream head;
      head << (f.return_type.is_void() ? "void" : type_prefix(f.return_type)) << ' ' << f.name
           << '(';
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i) head << ", ";
        const Param& p = f.params[i];
        head << type_prefix(p.type) << ' ' << p.name;
        if (p.type.is_array()) head << '[' << p.type.length << ']';
      }
      head << ") {";
      line(head.str(), f.span);
      for (const auto& s : f.body) stmt(*s, 1);
      line("}", std::nullopt);
      line("", std::nullopt);
    }
    if (!out_.lines.empty()) out_.lines.pop_back();
    return std::move(out_);
  }

 private:
  void line(std::string text, std::optional<Span> origin, bool synthetic = false) {
    out_.lines.push_back(PrintedLine{std::move(text), origin, synthetic});
  }

  static std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  void stmt_line(const Stmt& s, std::string text, int depth) {
    out_.stmt_line[&s] = static_cast<int>(out_.lines.size()) + 1;
    line(indent(depth) + text, s.span, s.synthetic);
  }

  void block_body(const std::vector<StmtPtr>& body, int depth) {
    for (const auto& s : body) stmt(*s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    std::ostringstream t;
    switch (s.kind) {
      case Stmt::Kind::Decl:
        t << type_prefix(s.decl_type) << ' ' << s.name;
        if (s.decl_type.is_array()) t << '[' << s.decl_type.length << ']';
        if (s.init) {
          t << " = ";
          emit(t, *s.init);
        } else if (s.has_init_list) {
          t << " = {";
          for (std::size_t i = 0; i < s.init_list.size(); ++i) {
            if (i) t << ", ";
            emit(t, *s.init_list[i]);
          }
          t << '}';
        }
        t << ';';
        stmt_line(s, t.str(), depth);
        break;
      case Stmt::Kind::Assign:
        emit(t, *s.target);
        t << " = ";
        emit(t, *s.expr);
        t << ';';
        stmt_line(s, t.str(), depth);
        break;
      case Stmt::Kind::Return:
        t << "return";
        if (s.expr) {
          t << ' ';
          emit(t, *s.expr);
        }
        t << ';';
        stmt_line(s, t.str(), depth);
        break;
      case Stmt::Kind::ExprStmt:
        emit(t, *s.expr);
        t << ';';
        stmt_line(s, t.str(), depth);
        break;
      case Stmt::Kind::Assume:
      case Stmt::Kind::Assert:
        t << (s.kind == Stmt::Kind::Assume ? "assume(" : "assert(");
        emit(t, *s.expr);
        t << ");";
        stmt_line(s, t.str(), depth);
        break;
      case Stmt::Kind::Block:
        stmt_line(s, "{", depth);
        block_body(s.body, depth + 1);
        line(indent(depth) + "}", std::nullopt);
        break;
      case Stmt::Kind::While:
        t << "while (";
        emit(t, *s.expr);
        t << ") {";
        stmt_line(s, t.str(), depth);
        block_body(s.body, depth + 1);
        line(indent(depth) + "}", std::nullopt);
        break;
      case Stmt::Kind::If: {
        t << "if (";
        emit(t, *s.expr);
        t << ") {";
        stmt_line(s, t.str(), depth);
        const Stmt* cur = &s;
        for (;;) {
          block_body(cur->body, depth + 1);
          if (!cur->has_else) break;
          if (cur->else_body.size() == 1 && cur->else_body[0]->kind == Stmt::Kind::If) {
            const Stmt& next = *cur->else_body[0];
            std::ostringstream e;
            e << "} else if (";
            emit(e, *next.expr);
            e << ") {";
            stmt_line(next, e.str(), depth);
            cur = &next;
            continue;
          }
          line(indent(depth) + "} else {", std::nullopt);
          block_body(cur->else_body, depth + 1);
          break;
        }
        line(indent(depth) + "}", std::nullopt);
        break;
      }
    }
  }

  PrintedUnit out_;
};

}  // namespace

std::string print(const Expr& e) {
  std::ostringstream out;
  emit(out, e);
  return out.str();
}

std::string PrintedUnit::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l.text;
    out += '\n';
  }
  return out;
}

PrintedUnit print_lines(const SourceUnit& unit) { return LinePrinter().run(unit); }

std::string print(const SourceUnit& unit) { return print_lines(unit).text(); }

}  // namespace regsentry::minic
