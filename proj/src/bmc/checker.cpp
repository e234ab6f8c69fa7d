#include "regsentry/bmc/checker.hpp"

#include <mutex>

#include "regsentry/error.hpp"
#include "regsentry/trace/interpreter.hpp"
#include "regsentry/util/parallel.hpp"

namespace regsentry::bmc {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::BudgetExceeded: return "BUDGET_EXCEEDED";
  }
  return "?";
}

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Valid: return "VALID";
    case Verdict::Kind::Violated: return "VIOLATED";
    case Verdict::Kind::Unknown: return "UNKNOWN";
  }
  return "?";
}

SolveResult solve(const Aig& aig, AigLit formula, const sat::Budget& budget) {
  SolveResult out;
  if (formula == kFalse) {
    out.status = SolveStatus::Unsat;
    return out;
  }
  out.inputs.assign(aig.num_inputs(), false);
  if (formula == kTrue) {
    out.status = SolveStatus::Sat;
    return out;
  }
  ConeCnf cone = to_cnf(aig, formula);
  sat::CnfResult r = sat::solve(cone.cnf, budget);
  out.stats = r.stats;
  switch (r.result) {
    case sat::Result::Unsat: out.status = SolveStatus::Unsat; break;
    case sat::Result::Unknown: out.status = SolveStatus::BudgetExceeded; break;
    case sat::Result::Sat:
      out.status = SolveStatus::Sat;
      for (std::size_t i = 0; i < cone.input_vars.size(); ++i)
        if (cone.input_vars[i] > 0) out.inputs[i] = r.model[static_cast<std::size_t>(cone.input_vars[i] - 1)];
      break;
  }
  return out;
}

std::string query_dimacs(const VcSet& vc, AigLit formula, const std::string& title) {
  ConeCnf cone = to_cnf(*vc.aig, formula);
  std::vector<std::string> comments{title, "entry " + vc.entry + ", width " + std::to_string(vc.width)};
  for (const auto& in : vc.inputs) {
    std::string line = "input " + in.name;
    for (AigLit b : in.bits) {
      int v = vc.aig->is_input(b.node()) ? cone.input_vars[static_cast<std::size_t>(vc.aig->input_index(b.node()))] : 0;
      line += " " + std::to_string(v);
    }
    comments.push_back(line);
  }
  return sat::to_dimacs(cone.cnf, comments);
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Counterexample decode(const InstrumentedUnit& iu, const VcSet& vc, std::size_t property,
                      const std::vector<bool>& inputs) {
  const std::vector<bool> nodes = vc.aig->simulate(inputs);
  Counterexample cex;
  cex.entry = vc.entry;
  cex.property = property;
  cex.arguments.resize(vc.param_slots.size());
  for (const auto& in : vc.inputs) {
    minic::Value v = BitBlaster::decode(nodes, in.bits);
    cex.inputs.emplace_back(in.name, v);
    cex.arguments[in.param].push_back(v);
  }
  std::size_t last = vc.events.size();
  for (const auto& inst : vc.assertions)
    if (inst.property == property && Aig::value(nodes, inst.violated)) {
      last = inst.event;
      break;
    }
  if (last == vc.events.size()) throw Error("model does not violate any assertion instance");
  for (std::size_t i = 0; i <= last; ++i) {
    const TraceEvent& ev = vc.events[i];
    if (!Aig::value(nodes, ev.guard)) continue;
    if (ev.assertion >= 0 && i != last) continue;
    CounterexampleStep step;
    step.at = iu.original_line(ev.line);
    step.function = ev.function;
    step.text = trim(iu.unit.source_line(step.at.file, step.at.line));
    step.violation = i == last;
    for (const auto& b : ev.bindings) {
      std::string name = b.name;
      if (!b.array.empty()) name = b.array + "." + std::to_string(BitBlaster::decode(nodes, b.index));
      step.bindings.emplace_back(name, BitBlaster::decode(nodes, b.value));
    }
    if (step.violation && !cex.steps.empty() && cex.steps.back().at == step.at) {
      CounterexampleStep& prev = cex.steps.back();
      prev.violation = true;
      for (auto& b : step.bindings) {
        bool seen = false;
        for (const auto& p : prev.bindings) seen = seen || p.first == b.first;
        if (!seen) prev.bindings.push_back(std::move(b));
      }
      continue;
    }
    cex.steps.push_back(std::move(step));
  }
  return cex;
}

int rank(const Verdict& v) {
  if (v.kind == Verdict::Kind::Violated) return 3;
  if (v.kind == Verdict::Kind::Unknown && v.reason != "unreached" && v.reason != "unmappable") return 2;
  if (v.kind == Verdict::Kind::Valid) return 1;
  return 0;
}

}  // namespace

std::vector<Verdict> check(const InstrumentedUnit& iu, const std::string& entry, const BmcConfig& cfg,
                           const CheckOptions& options) {
  VcSet vc = build_vc(iu, entry, cfg);
  const std::size_t n = iu.properties.size();
  std::vector<Verdict> out(n);
  for (auto& v : out) {
    v.entry = entry;
    v.kind = Verdict::Kind::Unknown;
    v.reason = "unreached";
  }
  for (std::size_t i : iu.unmappable) out[i].reason = "unmappable";

  bool unwinding_failed = false;
  if (cfg.unwinding_assertions && vc.unwinding_violated != kFalse)
    unwinding_failed = solve(*vc.aig, vc.unwinding_violated, cfg.budget).status != SolveStatus::Unsat;

  std::vector<const Condition*> queries;
  for (const auto& c : vc.conditions) {
    if (vc.depth_exceeded[c.property]) {
      out[c.property].reason = "unsupported-construct";
      continue;
    }
    queries.push_back(&c);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (vc.depth_exceeded[i] && !vc.reached[i]) out[i].reason = "unsupported-construct";

  std::mutex sink_mutex;
  util::parallel_for(queries.size(), options.parallelism, [&](std::size_t q) {
    const Condition& c = *queries[q];
    const infer::Property& p = iu.properties[c.property];
    if (options.cnf_sink) {
      std::string text = query_dimacs(vc, c.formula, "property " + p.id + " " + infer::to_text(p.formula));
      std::lock_guard lock(sink_mutex);
      options.cnf_sink(entry, c.property, text);
    }
    SolveResult r = solve(*vc.aig, c.formula, cfg.budget);
    Verdict& v = out[c.property];
    v.stats = r.stats;
    switch (r.status) {
      case SolveStatus::Unsat:
        v.kind = unwinding_failed ? Verdict::Kind::Unknown : Verdict::Kind::Valid;
        v.reason = unwinding_failed ? "unwinding" : "";
        break;
      case SolveStatus::BudgetExceeded:
        v.kind = Verdict::Kind::Unknown;
        v.reason = "budget";
        break;
      case SolveStatus::Sat: {
        v.kind = Verdict::Kind::Violated;
        v.reason.clear();
        v.counterexample = decode(iu, vc, c.property, r.inputs);
        if (options.self_check && iu.original) {
          ReplayResult rr = replay(*iu.original, p, *v.counterexample, cfg.bit_width);
          if (!rr.falsified || rr.max_loop_iterations > cfg.unroll_bound)
            throw Error("counterexample for '" + infer::to_text(p.formula) + "' at " +
                        minic::to_string(p.point) + " from " + entry + " does not replay" +
                        (rr.error.empty() ? "" : ": " + rr.error));
        }
        break;
      }
    }
  });
  return out;
}

std::vector<Verdict> check_entries(const InstrumentedUnit& iu, const std::vector<std::string>& entries,
                                   const BmcConfig& cfg, const CheckOptions& options) {
  std::vector<Verdict> best(iu.properties.size());
  for (auto& v : best) v.reason = "unreached";
  for (std::size_t i : iu.unmappable) best[i].reason = "unmappable";
  for (const auto& entry : entries) {
    std::vector<Verdict> vs = check(iu, entry, cfg, options);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      sat::Stats total = best[i].stats;
      total.conflicts += vs[i].stats.conflicts;
      total.decisions += vs[i].stats.decisions;
      total.propagations += vs[i].stats.propagations;
      total.restarts += vs[i].stats.restarts;
      if (rank(vs[i]) > rank(best[i])) best[i] = std::move(vs[i]);
      best[i].stats = total;
    }
  }
  return best;
}

ReplayResult replay(const minic::AnalyzedUnit& unit, const infer::Property& p, const Counterexample& cex,
                    int width) {
  ReplayResult out;
  trace::Interpreter interp(unit, trace::InterpreterConfig{width, 1'000'000});
  interp.observe(
      [&](const minic::PointInfo& info, const std::vector<minic::Value>& values) {
        if (info.point != p.point) return true;
        auto lookup = [&](const std::string& name) -> std::optional<minic::Value> {
          for (std::size_t i = 0; i < info.variables.size(); ++i)
            if (info.variables[i].name == name) return values[i];
          return std::nullopt;
        };
        if (!infer::evaluate(p.formula, lookup, width)) {
          out.falsified = true;
          return false;
        }
        return true;
      },
      [&](const std::string& f) { return f == p.point.function; });
  try {
    interp.call(cex.entry, cex.arguments);
  } catch (const RuntimeFault& e) {
    out.error = e.what();
  }
  out.max_loop_iterations = interp.max_loop_iterations();
  return out;
}

}  // namespace regsentry::bmc
