#include "regsentry/infer/property.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "regsentry/error.hpp"
#include "regsentry/minic/parser.hpp"

namespace regsentry::infer {

using minic::Expr;

const char* to_string(Template t) {
  switch (t) {
    case Template::EqConst: return "EqConst";
    case Template::LowerBound: return "LowerBound";
    case Template::UpperBound: return "UpperBound";
    case Template::NonZero: return "NonZero";
    case Template::OneOf: return "OneOf";
    case Template::RelVarVar: return "RelVarVar";
    case Template::OffsetEq: return "OffsetEq";
  }
  return "?";
}

const char* spelling(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Ge: return ">=";
    case RelOp::Le: return "<=";
  }
  return "?";
}

Formula Formula::eq_const(std::string v, Value c) {
  Formula f;
  f.kind = Template::EqConst;
  f.var = std::move(v);
  f.constant = c;
  return f;
}
Formula Formula::lower_bound(std::string v, Value c) {
  Formula f = eq_const(std::move(v), c);
  f.kind = Template::LowerBound;
  return f;
}
Formula Formula::upper_bound(std::string v, Value c) {
  Formula f = eq_const(std::move(v), c);
  f.kind = Template::UpperBound;
  return f;
}
Formula Formula::non_zero(std::string v) {
  Formula f = eq_const(std::move(v), 0);
  f.kind = Template::NonZero;
  return f;
}
Formula Formula::one_of(std::string v, std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Formula f;
  f.kind = Template::OneOf;
  f.var = std::move(v);
  f.set = std::move(values);
  return f;
}
Formula Formula::rel(std::string v, RelOp op, std::string w) {
  Formula f;
  f.kind = Template::RelVarVar;
  f.var = std::move(v);
  f.op = op;
  f.other = std::move(w);
  return f;
}
Formula Formula::offset_eq(std::string v, std::string w, Value c) {
  Formula f;
  f.kind = Template::OffsetEq;
  f.var = std::move(v);
  f.other = std::move(w);
  f.constant = c;
  return f;
}

std::vector<std::string> Formula::variables() const {
  if (kind == Template::RelVarVar || kind == Template::OffsetEq) return {var, other};
  return {var};
}

bool evaluate(const Formula& f,
              const std::function<std::optional<Value>(const std::string&)>& lookup, int width) {
  auto get = [&](const std::string& name) {
    auto v = lookup(name);
    if (!v) throw PointMismatch("variable '" + name + "' is not observed at this point");
    return *v;
  };
  Value v = get(f.var);
  switch (f.kind) {
    case Template::EqConst: return v == f.constant;
    case Template::LowerBound: return v >= f.constant;
    case Template::UpperBound: return v <= f.constant;
    case Template::NonZero: return v != 0;
    case Template::OneOf: return std::find(f.set.begin(), f.set.end(), v) != f.set.end();
    case Template::RelVarVar: {
      Value w = get(f.other);
      switch (f.op) {
        case RelOp::Eq: return v == w;
        case RelOp::Ne: return v != w;
        case RelOp::Ge: return v >= w;
        case RelOp::Le: return v <= w;
      }
      return false;
    }
    case Template::OffsetEq: return v == minic::wrap(get(f.other) + f.constant, width);
  }
  return false;
}

std::string name_to_text(const std::string& flattened) {
  auto dot = flattened.rfind('.');
  if (dot == std::string::npos || dot + 1 >= flattened.size()) return flattened;
  std::string tail = flattened.substr(dot + 1);
  if (!std::all_of(tail.begin(), tail.end(), [](unsigned char c) { return std::isdigit(c); }))
    return flattened;
  return flattened.substr(0, dot) + "[" + tail + "]";
}

std::string to_text(const Formula& f) {
  const std::string v = name_to_text(f.var);
  switch (f.kind) {
    case Template::EqConst: return v + " == " + std::to_string(f.constant);
    case Template::LowerBound: return v + " >= " + std::to_string(f.constant);
    case Template::UpperBound: return v + " <= " + std::to_string(f.constant);
    case Template::NonZero: return v + " != 0";
    case Template::OneOf: {
      std::string out;
      for (std::size_t i = 0; i < f.set.size(); ++i) {
        if (i) out += " || ";
        out += v + " == " + std::to_string(f.set[i]);
      }
      return out;
    }
    case Template::RelVarVar:
      return v + " " + spelling(f.op) + " " + name_to_text(f.other);
    case Template::OffsetEq: {
      const std::string w = name_to_text(f.other);
      if (f.constant >= 0) return v + " == " + w + " + " + std::to_string(f.constant);
      return v + " == " + w + " - " + std::to_string(-f.constant);
    }
  }
  return {};
}

namespace {

[[noreturn]] void not_template(const std::string& text) {
  throw ParseError("'" + text + "' is not a property template", 1, 1);
}

std::optional<std::string> as_name(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Field: return e.name + "." + e.field;
    case Expr::Kind::Index:
      if (e.operands[0]->kind == Expr::Kind::IntLit)
        return e.name + "." + std::to_string(e.operands[0]->value);
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<Value> as_constant(const Expr& e, int width) {
  if (e.kind == Expr::Kind::IntLit) return minic::wrap(e.value, width);
  if (e.kind == Expr::Kind::Unary && e.unary_op == minic::UnaryOp::Neg &&
      e.operands[0]->kind == Expr::Kind::IntLit)
    return minic::wrap(-e.operands[0]->value, width);
  return std::nullopt;
}

void collect_disjuncts(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::Binary && e.binary_op == minic::BinaryOp::Or) {
    collect_disjuncts(*e.operands[0], out);
    collect_disjuncts(*e.operands[1], out);
  } else {
    out.push_back(&e);
  }
}

}  // namespace

Formula parse_formula(const std::string& text, int width) {
  minic::ExprPtr e = minic::parse_expression(text, true);
  using minic::BinaryOp;
  if (e->kind != Expr::Kind::Binary) not_template(text);

  if (e->binary_op == BinaryOp::Or) {
    std::vector<const Expr*> parts;
    collect_disjuncts(*e, parts);
    if (parts.size() < 2 || parts.size() > 3) not_template(text);
    std::optional<std::string> var;
    std::vector<Value> values;
    for (const Expr* p : parts) {
      if (p->kind != Expr::Kind::Binary || p->binary_op != BinaryOp::Eq) not_template(text);
      auto n = as_name(*p->operands[0]);
      auto c = as_constant(*p->operands[1], width);
      if (!n || !c || (var && *var != *n)) not_template(text);
      var = n;
      values.push_back(*c);
    }
    return Formula::one_of(*var, values);
  }

  auto lhs = as_name(*e->operands[0]);
  if (!lhs) not_template(text);
  const Expr& rhs = *e->operands[1];
  auto rhs_name = as_name(rhs);
  auto rhs_const = as_constant(rhs, width);

  switch (e->binary_op) {
    case BinaryOp::Eq:
      if (rhs_const) return Formula::eq_const(*lhs, *rhs_const);
      if (rhs_name) return Formula::rel(*lhs, RelOp::Eq, *rhs_name);
      if (rhs.kind == Expr::Kind::Binary &&
          (rhs.binary_op == BinaryOp::Add || rhs.binary_op == BinaryOp::Sub)) {
        auto w = as_name(*rhs.operands[0]);
        auto c = as_constant(*rhs.operands[1], width);
        if (!w || !c) not_template(text);
        Value k = rhs.binary_op == BinaryOp::Add ? *c : minic::wrap(-*c, width);
        return Formula::offset_eq(*lhs, *w, k);
      }
      break;
    case BinaryOp::Ne:
      if (rhs_const && *rhs_const == 0) return Formula::non_zero(*lhs);
      if (rhs_name) return Formula::rel(*lhs, RelOp::Ne, *rhs_name);
      break;
    case BinaryOp::Ge:
      if (rhs_const) return Formula::lower_bound(*lhs, *rhs_const);
      if (rhs_name) return Formula::rel(*lhs, RelOp::Ge, *rhs_name);
      break;
    case BinaryOp::Le:
      if (rhs_const) return Formula::upper_bound(*lhs, *rhs_const);
      if (rhs_name) return Formula::rel(*lhs, RelOp::Le, *rhs_name);
      break;
    default: break;
  }
  not_template(text);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Dynamic: return "DYNAMIC";
    case Status::True: return "TRUE";
    case Status::Discarded: return "DISCARDED";
    case Status::Outdated: return "OUTDATED";
    case Status::NonRegression: return "NON_REGRESSION";
    case Status::Violated: return "VIOLATED";
    case Status::Preserved: return "PRESERVED";
    case Status::Unchecked: return "UNCHECKED";
    case Status::Unmappable: return "UNMAPPABLE";
  }
  return "?";
}

std::optional<Status> parse_status(const std::string& s) {
  for (Status st : {Status::Dynamic, Status::True, Status::Discarded, Status::Outdated,
                    Status::NonRegression, Status::Violated, Status::Preserved, Status::Unchecked,
                    Status::Unmappable})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

std::string property_id(const minic::ProgramPoint& point, const Formula& f) {
  std::string key = point.function + "|" + minic::to_string(point.kind) + "|" +
                    std::to_string(point.ordinal) + "|" + to_text(f);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Property make_property(const minic::ProgramPoint& point, Formula f) {
  Property p;
  p.id = property_id(point, f);
  p.point = point;
  p.formula = std::move(f);
  return p;
}

bool canonical_less(const Property& a, const Property& b) {
  if (a.point != b.point) return a.point < b.point;
  return a.formula < b.formula;
}

std::string format_property(const Property& p) {
  std::string out = std::string(to_string(p.status)) + " " + minic::to_string(p.point) + " " +
                    to_text(p.formula);
  return out;
}

Property parse_property(const std::string& line, int width) {
  std::istringstream in(line);
  std::string status, function, kind;
  if (!(in >> status >> function >> kind)) throw ParseError("malformed property line", 1, 1);
  auto st = parse_status(status);
  if (!st) throw ParseError("unknown property status '" + status + "'", 1, 1);
  minic::ProgramPoint point;
  point.function = function;
  if (kind == "ENTRY") {
    point.kind = minic::PointKind::Entry;
  } else if (kind == "EXIT") {
    point.kind = minic::PointKind::Exit;
  } else if (kind == "LOOP") {
    point.kind = minic::PointKind::Loop;
    if (!(in >> point.ordinal)) throw ParseError("LOOP without ordinal", 1, 1);
  } else {
    throw ParseError("unknown point kind '" + kind + "'", 1, 1);
  }
  std::string rest;
  std::getline(in, rest);
  Property p = make_property(point, parse_formula(rest, width));
  p.status = *st;
  return p;
}

std::string format_properties(const std::vector<Property>& props) {
  std::string out;
  for (const auto& p : props) out += format_property(p) + "\n";
  return out;
}

std::vector<Property> parse_properties(const std::string& text, int width) {
  std::vector<Property> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_property(line, width));
  }
  return out;
}

}  // namespace regsentry::infer
