#include "regsentry/trace/interpreter.hpp"

#include "regsentry/error.hpp"

namespace regsentry::trace {

using minic::BinaryOp;
using minic::Expr;
using minic::Stmt;
using minic::UnaryOp;

Interpreter::Interpreter(const minic::AnalyzedUnit& unit, InterpreterConfig config)
    : unit_(unit), config_(config) {}

void Interpreter::observe(PointObserver observer, std::function<bool(const std::string&)> filter) {
  observer_ = std::move(observer);
  filter_ = std::move(filter);
}

Interpreter::Outcome Interpreter::call(const std::string& function,
                                       const std::vector<std::vector<Value>>& args) {
  const minic::FunctionDef& f = unit_.function(function);
  if (args.size() != f.params.size())
    throw SemanticError(SemanticError::Kind::ArityMismatch,
                        "'" + function + "' expects " + std::to_string(f.params.size()) +
                            " arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (static_cast<int>(args[i].size()) != unit_.slot_count(f.params[i].type))
      throw SemanticError(SemanticError::Kind::TypeMismatch,
                          "argument " + std::to_string(i) + " of '" + function +
                              "' has the wrong size");
  Outcome out;
  steps_ = 0;
  try {
    std::vector<std::vector<Value>> wrapped = args;
    for (auto& a : wrapped)
      for (auto& v : a) v = minic::wrap(v, config_.width);
    out.result = invoke(f, std::move(wrapped));
  } catch (const Stop&) {
    out.stopped = true;
  }
  return out;
}

void Interpreter::tick() {
  if (++steps_ > config_.step_budget)
    throw RuntimeFault(RuntimeFault::Kind::StepBudget,
                       "step budget of " + std::to_string(config_.step_budget) + " exceeded");
}

void Interpreter::sample(Frame& frame, const minic::ProgramPoint& point) {
  if (!observer_ || !filter_ || !filter_(frame.function->name)) return;
  const minic::PointInfo* info = unit_.point(point);
  std::vector<Value> values;
  values.reserve(info->variables.size());
  for (const auto& v : info->variables) {
    if (v.variable == "return") {
      values.push_back(frame.result[static_cast<std::size_t>(v.slot)]);
    } else {
      values.push_back(lookup(frame, v.variable).slots[static_cast<std::size_t>(v.slot)]);
    }
  }
  if (!observer_(*info, values)) throw Stop{};
}

std::vector<Value> Interpreter::invoke(const minic::FunctionDef& f,
                                       std::vector<std::vector<Value>> args) {
  Frame frame;
  frame.function = &f;
  for (std::size_t i = 0; i < f.params.size(); ++i)
    frame.vars.push_back({f.params[i].name, f.params[i].type, std::move(args[i])});
  sample(frame, minic::ProgramPoint::entry(f.name));
  // Fall-through exit is sampled while the body's locals are still live.
  for (const auto& s : f.body) {
    exec(frame, *s);
    if (frame.returned) break;
  }
  if (!frame.returned) sample(frame, minic::ProgramPoint::exit(f.name));
  return std::move(frame.result);
}

void Interpreter::exec_block(Frame& frame, const std::vector<minic::StmtPtr>& stmts) {
  std::size_t mark = frame.vars.size();
  for (const auto& s : stmts) {
    exec(frame, *s);
    if (frame.returned) break;
  }
  frame.vars.resize(mark);
}

Interpreter::Variable& Interpreter::lookup(Frame& frame, const std::string& name) {
  for (auto it = frame.vars.rbegin(); it != frame.vars.rend(); ++it)
    if (it->name == name) return *it;
  throw SemanticError(SemanticError::Kind::UndefinedName, "undefined variable '" + name + "'");
}

Value& Interpreter::element(Frame& frame, const Expr& e) {
  Value index = eval(frame, *e.operands[0]);
  Variable& var = lookup(frame, e.name);
  if (index < 0 || index >= static_cast<Value>(var.slots.size()))
    throw RuntimeFault(RuntimeFault::Kind::OutOfBounds,
                       "index " + std::to_string(index) + " out of bounds for '" + e.name +
                           "' of length " + std::to_string(var.slots.size()) + " (line " +
                           std::to_string(e.span.line) + ")");
  return var.slots[static_cast<std::size_t>(index)];
}

void Interpreter::exec(Frame& frame, const Stmt& s) {
  tick();
  switch (s.kind) {
    case Stmt::Kind::Decl: {
      std::vector<Value> slots;
      if (s.init) {
        slots = eval_value(frame, *s.init);
      } else if (s.has_init_list) {
        for (const auto& e : s.init_list) slots.push_back(eval(frame, *e));
      } else {
        slots.assign(static_cast<std::size_t>(unit_.slot_count(s.decl_type)), 0);
      }
      frame.vars.push_back({s.name, s.decl_type, std::move(slots)});
      break;
    }
    case Stmt::Kind::Assign: {
      const Expr& t = *s.target;
      if (t.kind == Expr::Kind::Var) {
        std::vector<Value> v = eval_value(frame, *s.expr);
        lookup(frame, t.name).slots = std::move(v);
      } else if (t.kind == Expr::Kind::Field) {
        Value v = eval(frame, *s.expr);
        lookup(frame, t.name).slots[static_cast<std::size_t>(t.field_index)] = v;
      } else {
        Value v = eval(frame, *s.expr);
        element(frame, t) = v;
      }
      break;
    }
    case Stmt::Kind::If:
      if (eval(frame, *s.expr) != 0)
        exec_block(frame, s.body);
      else if (s.has_else)
        exec_block(frame, s.else_body);
      break;
    case Stmt::Kind::While: {
      const minic::ProgramPoint point = minic::ProgramPoint::loop(frame.function->name, s.ordinal);
      int iterations = 0;
      for (;;) {
        sample(frame, point);
        tick();
        if (eval(frame, *s.expr) == 0) break;
        ++iterations;
        if (iterations > max_iterations_) max_iterations_ = iterations;
        exec_block(frame, s.body);
        if (frame.returned) break;
      }
      break;
    }
    case Stmt::Kind::Return:
      if (s.expr) frame.result = eval_value(frame, *s.expr);
      frame.returned = true;
      sample(frame, minic::ProgramPoint::exit(frame.function->name));
      break;
    case Stmt::Kind::ExprStmt: eval_value(frame, *s.expr); break;
    case Stmt::Kind::Block: exec_block(frame, s.body); break;
    case Stmt::Kind::Assume:
      if (eval(frame, *s.expr) == 0)
        throw RuntimeFault(RuntimeFault::Kind::AssumeFailed,
                           "assumption failed at line " + std::to_string(s.span.line));
      break;
    case Stmt::Kind::Assert: eval(frame, *s.expr); break;
  }
}

std::vector<Value> Interpreter::eval_value(Frame& frame, const Expr& e) {
  if (e.kind == Expr::Kind::Call) {
    const minic::FunctionDef& callee = unit_.function(e.name);
    std::vector<std::vector<Value>> args;
    args.reserve(e.operands.size());
    for (const auto& a : e.operands) args.push_back(eval_value(frame, *a));
    return invoke(callee, std::move(args));
  }
  if (e.kind == Expr::Kind::Var) return lookup(frame, e.name).slots;
  return {eval(frame, e)};
}

Value Interpreter::eval(Frame& frame, const Expr& e) {
  const int w = config_.width;
  switch (e.kind) {
    case Expr::Kind::IntLit: return minic::wrap(e.value, w);
    case Expr::Kind::Var: return lookup(frame, e.name).slots.at(0);
    case Expr::Kind::Field:
      return lookup(frame, e.name).slots[static_cast<std::size_t>(e.field_index)];
    case Expr::Kind::Index: return element(frame, e);
    case Expr::Kind::Call: {
      auto v = eval_value(frame, e);
      return v.at(0);
    }
    case Expr::Kind::Unary: {
      Value x = eval(frame, *e.operands[0]);
      return e.unary_op == UnaryOp::Neg ? minic::wrap(-x, w) : Value{x == 0};
    }
    case Expr::Kind::Binary: {
      if (e.binary_op == BinaryOp::And) {
        if (eval(frame, *e.operands[0]) == 0) return 0;
        return eval(frame, *e.operands[1]) != 0;
      }
      if (e.binary_op == BinaryOp::Or) {
        if (eval(frame, *e.operands[0]) != 0) return 1;
        return eval(frame, *e.operands[1]) != 0;
      }
      Value a = eval(frame, *e.operands[0]);
      Value b = eval(frame, *e.operands[1]);
      switch (e.binary_op) {
        case BinaryOp::Add: return minic::wrap(a + b, w);
        case BinaryOp::Sub: return minic::wrap(a - b, w);
        case BinaryOp::Mul: return minic::wrap(a * b, w);
        case BinaryOp::Div: return minic::divide(a, b, w);
        case BinaryOp::Mod: return minic::remainder(a, b, w);
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        default: break;
      }
    }
  }
  return 0;
}

}  // namespace regsentry::trace
