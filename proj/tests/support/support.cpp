#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "regsentry/bmc/instrument.hpp"
#include "regsentry/error.hpp"
#include "regsentry/infer/inference.hpp"
#include "regsentry/minic/parser.hpp"
#include "regsentry/trace/interpreter.hpp"

namespace regsentry::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(REGSENTRY_SOURCE_DIR) / "data"; }
fs::path test_data_dir() { return fs::path(REGSENTRY_SOURCE_DIR) / "tests" / "data"; }

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::path(REGSENTRY_BINARY_DIR) / "scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

minic::AnalyzedUnit analyze_text(const std::string& source) { return minic::analyze(minic::parse(source)); }

// ---------------------------------------------------------------------------
// Random programs

namespace {

class Generator {
 public:
  Generator(std::mt19937& rng, const GenOptions& o) : rng_(rng), o_(o) {}

  std::string program() {
    std::ostringstream out;
    for (int k = 0; k < o_.functions; ++k) {
      const int arity = pick(1, o_.max_params);
      arity_.push_back(arity);
      out << function(k, arity) << "\n";
    }
    return out.str();
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  std::string literal() {
    int v = pick(-9, 9);
    return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
  }

  std::string expr(int depth) {
    if (depth <= 0 || chance(30)) {
      if (chance(65) && !readable_.empty()) return readable_[static_cast<std::size_t>(pick(0, static_cast<int>(readable_.size()) - 1))];
      return literal();
    }
    const int choice = pick(0, 9);
    if (choice == 0) return "(-" + expr(depth - 1) + ")";
    if (choice == 1) return "(!" + expr(depth - 1) + ")";
    if (choice == 2 && current_ > 0) {
      const int callee = pick(0, current_ - 1);
      std::string call = "f" + std::to_string(callee) + "(";
      for (int a = 0; a < arity_[static_cast<std::size_t>(callee)]; ++a) call += (a ? ", " : "") + expr(depth - 1);
      return call + ")";
    }
    static const char* ops[] = {"+", "-", "*", "/", "%", "<", "<=", "==", "!=", ">", ">=", "&&", "||", "+", "-"};
    const char* op = ops[pick(0, 14)];
    return "(" + expr(depth - 1) + " " + op + " " + expr(depth - 1) + ")";
  }

  void statements(std::ostringstream& out, int count, int indent, bool allow_loop) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (int s = 0; s < count; ++s) {
      const int kind = pick(0, 9);
      if (kind <= 4 && !assignable_.empty()) {
        out << pad << assignable_[static_cast<std::size_t>(pick(0, static_cast<int>(assignable_.size()) - 1))] << " = "
            << expr(o_.max_expr_depth) << ";\n";
      } else if (kind <= 6 && indent < 8) {
        out << pad << "if (" << expr(o_.max_expr_depth) << ") {\n";
        statements(out, pick(0, 2), indent + 2, false);
        if (chance(50)) {
          out << pad << "} else {\n";
          statements(out, pick(0, 2), indent + 2, false);
        }
        out << pad << "}\n";
      } else if (kind == 7 && chance(40)) {
        out << pad << "if (" << expr(1) << ") {\n" << pad << "  return " << expr(o_.max_expr_depth) << ";\n" << pad << "}\n";
      } else if (kind >= 8 && allow_loop && o_.loops) {
        const std::string c = "c" + std::to_string(loops_++);
        out << pad << "int " << c << " = 0;\n";
        readable_.push_back(c);
        out << pad << "while (" << c << " < " << pick(0, o_.max_loop_trips);
        if (chance(30)) out << " && " << expr(1);
        out << ") {\n";
        statements(out, pick(1, 3), indent + 2, false);
        out << pad << "  " << c << " = " << c << " + 1;\n" << pad << "}\n";
      }
    }
  }

  std::string function(int k, int arity) {
    current_ = k;
    readable_.clear();
    assignable_.clear();
    loops_ = 0;
    std::ostringstream out;
    out << "int f" << k << "(";
    for (int a = 0; a < arity; ++a) {
      const std::string p = "p" + std::to_string(a);
      out << (a ? ", " : "") << "int " << p;
      readable_.push_back(p);
      assignable_.push_back(p);
    }
    out << ") {\n";
    const int locals = pick(0, o_.max_locals);
    for (int l = 0; l < locals; ++l) {
      const std::string v = "v" + std::to_string(l);
      out << "  int " << v << " = " << expr(o_.max_expr_depth) << ";\n";
      readable_.push_back(v);
      assignable_.push_back(v);
    }
    statements(out, pick(1, o_.max_statements), 2, true);
    out << "  return " << expr(o_.max_expr_depth) << ";\n}\n";
    return out.str();
  }

  std::mt19937& rng_;
  const GenOptions& o_;
  std::vector<int> arity_;
  std::vector<std::string> readable_;
  std::vector<std::string> assignable_;
  int current_ = 0;
  int loops_ = 0;
};

}  // namespace

std::string random_program(std::mt19937& rng, const GenOptions& options) {
  return Generator(rng, options).program();
}

// ---------------------------------------------------------------------------
// Inputs and tracing

int input_slots(const minic::AnalyzedUnit& unit, const std::string& function) {
  int n = 0;
  for (const auto& p : unit.function(function).params) n += unit.slot_count(p.type);
  return n;
}

Args split_args(const minic::AnalyzedUnit& unit, const std::string& function, const std::vector<Value>& flat) {
  Args args;
  std::size_t at = 0;
  for (const auto& p : unit.function(function).params) {
    const auto n = static_cast<std::size_t>(unit.slot_count(p.type));
    args.emplace_back(flat.begin() + static_cast<long>(at), flat.begin() + static_cast<long>(at + n));
    at += n;
  }
  return args;
}

void for_each_input(const minic::AnalyzedUnit& unit, const std::string& function, int width,
                    const std::function<void(const Args&)>& fn) {
  const int slots = input_slots(unit, function);
  if (slots * width > 24) throw Error("input space too large to enumerate");
  const std::uint64_t per = 1ULL << width;
  std::uint64_t total = 1;
  for (int i = 0; i < slots; ++i) total *= per;
  std::vector<Value> flat(static_cast<std::size_t>(slots));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int i = 0; i < slots; ++i) {
      flat[static_cast<std::size_t>(i)] = minic::wrap(static_cast<Value>(c % per), width);
      c /= per;
    }
    fn(split_args(unit, function, flat));
  }
}

Args random_args(const minic::AnalyzedUnit& unit, const std::string& function, int width, std::mt19937& rng) {
  std::uniform_int_distribution<Value> dist(minic::min_value(width), minic::max_value(width));
  std::vector<Value> flat(static_cast<std::size_t>(input_slots(unit, function)));
  for (auto& v : flat) v = dist(rng);
  return split_args(unit, function, flat);
}

trace::TraceLog trace_calls(const minic::AnalyzedUnit& unit, const std::string& entry,
                            const std::vector<Args>& inputs, int width) {
  trace::TraceLog log;
  log.width = width;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string test = "input" + std::to_string(i);
    log.tests_run.push_back(test);
    std::uint64_t seq = 0;
    trace::Interpreter interp(unit, trace::InterpreterConfig{width, 1'000'000});
    interp.observe(
        [&](const minic::PointInfo& info, const std::vector<Value>& values) {
          trace::TraceSample s;
          s.point = log.intern(info);
          s.test = test;
          s.sequence = ++seq;
          s.values = values;
          log.samples.push_back(std::move(s));
          return true;
        },
        [](const std::string&) { return true; });
    try {
      interp.call(entry, inputs[i]);
    } catch (const RuntimeFault&) {
    }
  }
  return log;
}

std::vector<bool> exhaustive_falsified(const minic::AnalyzedUnit& unit, const std::string& entry,
                                       const std::vector<infer::Property>& props, int width) {
  std::vector<bool> out(props.size(), false);
  std::map<minic::ProgramPoint, std::vector<std::size_t>> by_point;
  for (std::size_t i = 0; i < props.size(); ++i) by_point[props[i].point].push_back(i);
  trace::Interpreter interp(unit, trace::InterpreterConfig{width, 1'000'000});
  interp.observe(
      [&](const minic::PointInfo& info, const std::vector<Value>& values) {
        auto it = by_point.find(info.point);
        if (it == by_point.end()) return true;
        auto lookup = [&](const std::string& name) -> std::optional<Value> {
          for (std::size_t k = 0; k < info.variables.size(); ++k)
            if (info.variables[k].name == name) return values[k];
          return std::nullopt;
        };
        for (std::size_t i : it->second)
          if (!out[i] && !infer::evaluate(props[i].formula, lookup, width)) out[i] = true;
        return true;
      },
      [](const std::string&) { return true; });
  for_each_input(unit, entry, width, [&](const Args& args) {
    try {
      interp.call(entry, args);
    } catch (const RuntimeFault& e) {
      if (e.kind() == RuntimeFault::Kind::StepBudget) throw;
    }
  });
  return out;
}

change::AnalysisScope whole_scope(const minic::AnalyzedUnit& unit) {
  change::AnalysisScope s;
  for (const auto& f : unit.unit().functions) s.monitored.insert(f.name);
  return s;
}

std::vector<OracleProgram> oracle_programs() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(test_data_dir() / "bmc_oracle"))
    if (e.path().extension() == ".mc") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<OracleProgram> out;
  for (const auto& f : files) {
    OracleProgram p;
    p.name = f.stem().string();
    p.source = read_file(f);
    std::istringstream in(p.source);
    std::string line;
    while (std::getline(in, line) && line.rfind("//", 0) == 0) {
      std::istringstream words(line.substr(2));
      std::string key;
      words >> key;
      if (key == "width") words >> p.width;
      if (key == "entry") words >> p.entry;
    }
    if (p.entry.empty()) throw Error(f.string() + ": missing entry header");
    out.push_back(std::move(p));
  }
  return out;
}

void tally_replays(const bmc::InstrumentedUnit& iu, const std::vector<bmc::Verdict>& verdicts,
                   const bmc::BmcConfig& cfg, ReplayTally& tally) {
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].kind != bmc::Verdict::Kind::Violated) continue;
    ++tally.violated;
    const bmc::ReplayResult r =
        bmc::replay(*iu.original, iu.properties[i], *verdicts[i].counterexample, cfg.bit_width);
    if (!r.falsified || r.max_loop_iterations > cfg.unroll_bound) ++tally.replay_failures;
  }
}

OracleOutcome compare_with_enumeration(const OracleProgram& program, std::uint32_t seed, ReplayTally& tally,
                                       int unroll_bound) {
  OracleOutcome out;
  minic::AnalyzedUnit unit = analyze_text(program.source);
  std::mt19937 rng(seed);
  std::vector<Args> inputs;
  for (int i = 0; i < 6; ++i) inputs.push_back(random_args(unit, program.entry, program.width, rng));
  const int slots = input_slots(unit, program.entry);
  for (Value v : {Value{0}, Value{1}, Value{-1}})
    inputs.push_back(split_args(unit, program.entry, std::vector<Value>(static_cast<std::size_t>(slots), v)));
  trace::TraceLog log = trace_calls(unit, program.entry, inputs, program.width);
  std::vector<infer::Property> props = infer::infer(log, whole_scope(unit), 1);
  out.properties = props.size();

  bmc::BmcConfig cfg;
  cfg.bit_width = program.width;
  cfg.unroll_bound = unroll_bound;
  bmc::InstrumentedUnit iu = bmc::instrument(unit, props);
  std::vector<bmc::Verdict> verdicts = bmc::check(iu, program.entry, cfg);
  std::vector<bool> falsified = exhaustive_falsified(unit, program.entry, props, program.width);
  tally_replays(iu, verdicts, cfg, tally);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& v = verdicts[i];
    const std::string what = program.name + ": " + minic::to_string(props[i].point) + " " +
                             infer::to_text(props[i].formula);
    if (v.kind == bmc::Verdict::Kind::Unknown) {
      ++out.unknown;
      out.disagreements.push_back(what + " UNKNOWN(" + v.reason + ")");
      continue;
    }
    const bool bmc_violated = v.kind == bmc::Verdict::Kind::Violated;
    (bmc_violated ? out.violated : out.valid)++;
    if (bmc_violated != falsified[i])
      out.disagreements.push_back(what + ": bmc " + bmc::to_string(v.kind) + ", enumeration " +
                                  (falsified[i] ? "falsified" : "holds"));
  }
  return out;
}

}  // namespace regsentry::testing
