#include "regsentry/bmc/vc.hpp"

#include "regsentry/error.hpp"

namespace regsentry::bmc {

using minic::BinaryOp;
using minic::Expr;
using minic::Stmt;
using minic::TypeTag;

void validate(const BmcConfig& cfg) {
  if (cfg.unroll_bound < 1) throw ConfigError("unroll_bound must be at least 1");
  if (cfg.inline_depth < 1) throw ConfigError("inline_depth must be at least 1");
  if (cfg.bit_width < 4 || cfg.bit_width > 32) throw ConfigError("bit_width must be within 4..32");
}

namespace {

struct SymVar {
  std::string name;
  TypeTag type;
  std::vector<Word> slots;
};

struct Frame {
  const minic::FunctionDef* function = nullptr;
  std::vector<SymVar> vars;
  AigLit returned = kFalse;
  std::vector<Word> result;
  int depth = 0;
};

constexpr const char* kTempPrefix = "__ret";

class Executor {
 public:
  Executor(const InstrumentedUnit& iu, const BmcConfig& cfg, VcSet& out)
      : iu_(iu), au_(iu.unit), cfg_(cfg), out_(out), aig_(*out.aig), bb_(aig_, cfg.bit_width) {}

  void run(const std::string& entry) {
    const minic::FunctionDef& f = au_.function(entry);
    Frame frame;
    frame.function = &f;
    frame.result = zeros(f.return_type);
    TraceEvent call = event(f.name, iu_.function_line.count(f.name) ? iu_.function_line.at(f.name) : 0, kTrue);
    for (std::size_t p = 0; p < f.params.size(); ++p) {
      SymVar v{f.params[p].name, f.params[p].type, {}};
      auto names = slot_names(v.name, v.type);
      out_.param_slots.push_back(names.size());
      for (std::size_t s = 0; s < names.size(); ++s) {
        Word w = bb_.fresh();
        out_.inputs.push_back(InputSlot{names[s], p, s, w});
        v.slots.push_back(w);
        call.bindings.push_back(Binding{names[s], w, {}, {}});
      }
      frame.vars.push_back(std::move(v));
    }
    out_.events.push_back(std::move(call));
    exec_block(frame, f.body, kTrue);
  }

 private:
  std::vector<std::string> slot_names(const std::string& name, const TypeTag& type) const {
    std::vector<std::string> out;
    if (type.is_int()) {
      out.push_back(name);
    } else if (type.is_record()) {
      for (const auto& field : au_.record(type.record).fields) out.push_back(name + "." + field);
    } else if (type.is_array()) {
      for (int k = 0; k < type.length; ++k) out.push_back(name + "." + std::to_string(k));
    }
    return out;
  }

  std::vector<Word> zeros(const TypeTag& type) const {
    if (type.is_void()) return {};
    return std::vector<Word>(static_cast<std::size_t>(au_.slot_count(type)), bb_.constant(0));
  }

  static TraceEvent event(const std::string& function, int line, AigLit guard) {
    TraceEvent e;
    e.function = function;
    e.line = line;
    e.guard = guard;
    return e;
  }

  std::vector<Binding> bindings_of(const std::string& display, const SymVar& v) const {
    std::vector<Binding> out;
    auto names = slot_names(display, v.type);
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back(Binding{names[i], v.slots[i], {}, {}});
    return out;
  }

  AigLit effective(const Frame& frame, AigLit path) { return aig_.land(path, ~frame.returned); }

  void assume(AigLit guard, AigLit cond) { assume_ok_ = aig_.land(assume_ok_, aig_.implies(guard, cond)); }

  SymVar& lookup(Frame& frame, const std::string& name) {
    for (auto it = frame.vars.rbegin(); it != frame.vars.rend(); ++it)
      if (it->name == name) return *it;
    throw SemanticError(SemanticError::Kind::UndefinedName, "undefined variable '" + name + "'");
  }

  void exec_block(Frame& frame, const std::vector<minic::StmtPtr>& stmts, AigLit path) {
    const std::size_t mark = frame.vars.size();
    for (const auto& s : stmts) {
      if (effective(frame, path) == kFalse) break;
      exec(frame, *s, path);
    }
    frame.vars.resize(mark);
  }

  void exec(Frame& frame, const Stmt& s, AigLit path) {
    const AigLit g = effective(frame, path);
    if (g == kFalse) return;
    const std::string& fname = frame.function->name;
    switch (s.kind) {
      case Stmt::Kind::Decl: {
        SymVar v{s.name, s.decl_type, {}};
        if (s.init) {
          v.slots = eval_value(frame, *s.init, g);
        } else if (s.has_init_list) {
          for (const auto& e : s.init_list) v.slots.push_back(eval(frame, *e, g));
        } else {
          v.slots = zeros(s.decl_type);
        }
        TraceEvent ev = event(fname, iu_.line_of(s), g);
        const bool temp = s.synthetic && s.name.rfind(kTempPrefix, 0) == 0;
        ev.bindings = bindings_of(temp ? "return" : s.name, v);
        out_.events.push_back(std::move(ev));
        frame.vars.push_back(std::move(v));
        break;
      }
      case Stmt::Kind::Assign: {
        const Expr& t = *s.target;
        TraceEvent ev = event(fname, iu_.line_of(s), g);
        if (t.kind == Expr::Kind::Var) {
          std::vector<Word> value = eval_value(frame, *s.expr, g);
          SymVar& v = lookup(frame, t.name);
          for (std::size_t i = 0; i < v.slots.size(); ++i) v.slots[i] = bb_.ite(g, value[i], v.slots[i]);
          ev.bindings = bindings_of(v.name, v);
        } else if (t.kind == Expr::Kind::Field) {
          Word value = eval(frame, *s.expr, g);
          SymVar& v = lookup(frame, t.name);
          auto& slot = v.slots[static_cast<std::size_t>(t.field_index)];
          slot = bb_.ite(g, value, slot);
          ev.bindings.push_back(Binding{t.name + "." + t.field, slot, {}, {}});
        } else {
          Word value = eval(frame, *s.expr, g);
          Word index = eval(frame, *t.operands[0], g);
          SymVar& v = lookup(frame, t.name);
          AigLit in_bounds = kFalse;
          for (std::size_t k = 0; k < v.slots.size() && static_cast<minic::Value>(k) <= minic::max_value(cfg_.bit_width); ++k) {
            AigLit hit = bb_.eq(index, bb_.constant(static_cast<minic::Value>(k)));
            in_bounds = aig_.lor(in_bounds, hit);
            v.slots[k] = bb_.ite(aig_.land(g, hit), value, v.slots[k]);
          }
          assume(g, in_bounds);
          ev.bindings.push_back(Binding{{}, value, t.name, index});
        }
        out_.events.push_back(std::move(ev));
        break;
      }
      case Stmt::Kind::If: {
        AigLit c = bb_.nonzero(eval(frame, *s.expr, g));
        exec_block(frame, s.body, aig_.land(g, c));
        if (s.has_else) exec_block(frame, s.else_body, aig_.land(g, ~c));
        break;
      }
      case Stmt::Kind::While: {
        AigLit guard = g;
        for (int k = 0; k < cfg_.unroll_bound; ++k) {
          guard = effective(frame, guard);
          if (guard == kFalse) break;
          AigLit c = bb_.nonzero(eval(frame, *s.expr, guard));
          guard = aig_.land(guard, c);
          exec_block(frame, s.body, guard);
        }
        guard = effective(frame, guard);
        if (guard != kFalse) {
          AigLit c = bb_.nonzero(eval(frame, *s.expr, guard));
          if (cfg_.unwinding_assertions)
            out_.unwinding_violated =
                aig_.lor(out_.unwinding_violated, aig_.land(aig_.land(guard, assume_ok_), c));
          else
            assume(guard, ~c);
        }
        break;
      }
      case Stmt::Kind::Return: {
        TraceEvent ev = event(fname, iu_.line_of(s), g);
        if (s.expr) {
          std::vector<Word> value = eval_value(frame, *s.expr, g);
          for (std::size_t i = 0; i < value.size(); ++i)
            frame.result[i] = bb_.ite(g, value[i], frame.result[i]);
          const bool via_temp = s.expr->kind == Expr::Kind::Var && s.expr->name.rfind(kTempPrefix, 0) == 0;
          if (!via_temp) {
            SymVar shown{"return", frame.function->return_type, value};
            ev.bindings = bindings_of("return", shown);
            out_.events.push_back(std::move(ev));
          }
        } else {
          out_.events.push_back(std::move(ev));
        }
        frame.returned = aig_.lor(frame.returned, g);
        break;
      }
      case Stmt::Kind::ExprStmt:
        out_.events.push_back(event(fname, iu_.line_of(s), g));
        eval_value(frame, *s.expr, g);
        break;
      case Stmt::Kind::Block: exec_block(frame, s.body, g); break;
      case Stmt::Kind::Assume: assume(g, bb_.nonzero(eval(frame, *s.expr, g))); break;
      case Stmt::Kind::Assert: {
        AigLit c = bb_.nonzero(eval(frame, *s.expr, g));
        AssertionInstance inst;
        inst.property = static_cast<std::size_t>(s.ordinal);
        inst.violated = aig_.land(aig_.land(g, assume_ok_), ~c);
        inst.event = out_.events.size();
        inst.after_havoc = havoc_seen_;
        TraceEvent ev = event(fname, iu_.line_of(s), g);
        ev.assertion = static_cast<int>(out_.assertions.size());
        ev.bindings = assertion_bindings(frame, inst.property);
        out_.events.push_back(std::move(ev));
        out_.assertions.push_back(inst);
        break;
      }
    }
  }

  // Values of the asserted formula's variables, for display.
  std::vector<Binding> assertion_bindings(Frame& frame, std::size_t property) {
    std::vector<Binding> out;
    if (property >= iu_.properties.size() || !iu_.original) return out;
    const infer::Property& p = iu_.properties[property];
    const minic::PointInfo* info = iu_.original->point(p.point);
    if (!info) return out;
    for (const auto& name : p.formula.variables()) {
      const minic::SchemaVar* sv = info->find(name);
      if (!sv) continue;
      const SymVar* v = nullptr;
      if (sv->variable == "return") {
        for (auto it = frame.vars.rbegin(); it != frame.vars.rend() && !v; ++it)
          if (it->name.rfind(kTempPrefix, 0) == 0) v = &*it;
      } else {
        v = &lookup(frame, sv->variable);
      }
      if (v && static_cast<std::size_t>(sv->slot) < v->slots.size())
        out.push_back(Binding{name, v->slots[static_cast<std::size_t>(sv->slot)], {}, {}});
    }
    return out;
  }

  std::vector<Word> call(Frame& caller, const Expr& e, AigLit g) {
    const minic::FunctionDef& f = au_.function(e.name);
    std::vector<std::vector<Word>> args;
    for (const auto& a : e.operands) args.push_back(eval_value(caller, *a, g));
    if (caller.depth + 1 > cfg_.inline_depth) {
      havoc_seen_ = true;
      out_.havocked.insert(f.name);
      std::vector<Word> result;
      for (std::size_t i = 0; i < zeros(f.return_type).size(); ++i) result.push_back(bb_.fresh());
      return result;
    }
    Frame frame;
    frame.function = &f;
    frame.depth = caller.depth + 1;
    frame.result = zeros(f.return_type);
    TraceEvent ev = event(f.name, iu_.function_line.count(f.name) ? iu_.function_line.at(f.name) : 0, g);
    for (std::size_t p = 0; p < f.params.size(); ++p) {
      SymVar v{f.params[p].name, f.params[p].type, std::move(args[p])};
      auto b = bindings_of(v.name, v);
      ev.bindings.insert(ev.bindings.end(), b.begin(), b.end());
      frame.vars.push_back(std::move(v));
    }
    out_.events.push_back(std::move(ev));
    exec_block(frame, f.body, g);
    return std::move(frame.result);
  }

  std::vector<Word> eval_value(Frame& frame, const Expr& e, AigLit g) {
    if (e.kind == Expr::Kind::Call) return call(frame, e, g);
    if (e.kind == Expr::Kind::Var) return lookup(frame, e.name).slots;
    return {eval(frame, e, g)};
  }

  Word select(Frame& frame, const Expr& e, AigLit g) {
    Word index = eval(frame, *e.operands[0], g);
    const SymVar& v = lookup(frame, e.name);
    Word result = bb_.constant(0);
    AigLit in_bounds = kFalse;
    for (std::size_t k = 0; k < v.slots.size() && static_cast<minic::Value>(k) <= minic::max_value(cfg_.bit_width); ++k) {
      AigLit hit = bb_.eq(index, bb_.constant(static_cast<minic::Value>(k)));
      in_bounds = aig_.lor(in_bounds, hit);
      result = bb_.ite(hit, v.slots[k], result);
    }
    assume(g, in_bounds);
    return result;
  }

  Word eval(Frame& frame, const Expr& e, AigLit g) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return bb_.constant(minic::wrap(e.value, cfg_.bit_width));
      case Expr::Kind::Var: return lookup(frame, e.name).slots.at(0);
      case Expr::Kind::Field: return lookup(frame, e.name).slots[static_cast<std::size_t>(e.field_index)];
      case Expr::Kind::Index: return select(frame, e, g);
      case Expr::Kind::Call: return call(frame, e, g).at(0);
      case Expr::Kind::Unary: {
        Word x = eval(frame, *e.operands[0], g);
        if (e.unary_op == minic::UnaryOp::Neg) return bb_.neg(x);
        return bb_.from_bool(~bb_.nonzero(x));
      }
      case Expr::Kind::Binary: break;
    }
    if (e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or) {
      AigLit a = bb_.nonzero(eval(frame, *e.operands[0], g));
      const bool is_and = e.binary_op == BinaryOp::And;
      AigLit rhs_guard = aig_.land(g, is_and ? a : ~a);
      AigLit b = rhs_guard == kFalse ? kFalse : bb_.nonzero(eval(frame, *e.operands[1], rhs_guard));
      return bb_.from_bool(is_and ? aig_.land(a, b) : aig_.lor(a, b));
    }
    Word a = eval(frame, *e.operands[0], g);
    Word b = eval(frame, *e.operands[1], g);
    switch (e.binary_op) {
      case BinaryOp::Add: return bb_.add(a, b);
      case BinaryOp::Sub: return bb_.sub(a, b);
      case BinaryOp::Mul: return bb_.mul(a, b);
      case BinaryOp::Div: return bb_.sdiv(a, b);
      case BinaryOp::Mod: return bb_.srem(a, b);
      case BinaryOp::Lt: return bb_.from_bool(bb_.slt(a, b));
      case BinaryOp::Le: return bb_.from_bool(bb_.sle(a, b));
      case BinaryOp::Gt: return bb_.from_bool(bb_.slt(b, a));
      case BinaryOp::Ge: return bb_.from_bool(bb_.sle(b, a));
      case BinaryOp::Eq: return bb_.from_bool(bb_.eq(a, b));
      case BinaryOp::Ne: return bb_.from_bool(~bb_.eq(a, b));
      default: break;
    }
    return bb_.constant(0);
  }

  const InstrumentedUnit& iu_;
  const minic::AnalyzedUnit& au_;
  BmcConfig cfg_;
  VcSet& out_;
  Aig& aig_;
  BitBlaster bb_;
  AigLit assume_ok_ = kTrue;
  bool havoc_seen_ = false;
};

// Functions reachable from `roots` in the call graph, roots included.
std::set<std::string> reachable(const minic::CallGraph& cg, const std::set<std::string>& roots) {
  std::set<std::string> seen;
  std::vector<std::string> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    std::string f = stack.back();
    stack.pop_back();
    if (!seen.insert(f).second) continue;
    for (const auto& g : cg.callees(f)) stack.push_back(g);
  }
  return seen;
}

}  // namespace

VcSet build_vc(const InstrumentedUnit& iu, const std::string& entry, const BmcConfig& cfg) {
  validate(cfg);
  VcSet out;
  out.aig = std::make_shared<Aig>();
  out.entry = entry;
  out.width = cfg.bit_width;
  Executor(iu, cfg, out).run(entry);

  const std::size_t n = iu.properties.size();
  std::vector<AigLit> violated(n, kFalse);
  out.reached.assign(n, false);
  out.depth_exceeded.assign(n, false);
  for (const auto& inst : out.assertions) {
    if (inst.property >= n) continue;
    if (inst.after_havoc) out.depth_exceeded[inst.property] = true;
    if (out.events[inst.event].guard == kFalse) continue;
    out.reached[inst.property] = true;
    violated[inst.property] = out.aig->lor(violated[inst.property], inst.violated);
  }
  if (!out.havocked.empty()) {
    auto skipped = reachable(iu.unit.call_graph(), out.havocked);
    for (std::size_t i = 0; i < n; ++i)
      if (skipped.count(iu.properties[i].point.function)) out.depth_exceeded[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.reached[i]) out.conditions.push_back(Condition{i, violated[i]});
  return out;
}

}  // namespace regsentry::bmc
