#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "regsentry/minic/analyzer.hpp"
#include "regsentry/minic/semantics.hpp"

namespace regsentry::trace {

using minic::Value;

struct InterpreterConfig {
  int width = 16;
  std::uint64_t step_budget = 1'000'000;  // per top-level call
};

/// Called at every program point of an observed function with the values of
/// the point's schema, in schema order. Returning false stops execution.
using PointObserver = std::function<bool(const minic::PointInfo&, const std::vector<Value>&)>;

/// Deterministic MiniC interpreter with W-bit wraparound arithmetic.
class Interpreter {
 public:
  Interpreter(const minic::AnalyzedUnit& unit, InterpreterConfig config);

  /// Observe points of functions for which `filter` returns true.
  void observe(PointObserver observer, std::function<bool(const std::string&)> filter);

  struct Outcome {
    std::vector<Value> result;  // flat return value; empty for void
    bool stopped = false;       // observer requested a stop
  };

  /// Calls `function` with flat argument values, one vector per parameter.
  /// Throws RuntimeFault on out-of-bounds access, failed assume, or when
  /// the step budget is exhausted.
  Outcome call(const std::string& function, const std::vector<std::vector<Value>>& args);

  /// Largest iteration count reached by any loop activation so far.
  int max_loop_iterations() const { return max_iterations_; }
  std::uint64_t steps() const { return steps_; }

 private:
  struct Variable {
    std::string name;
    minic::TypeTag type;
    std::vector<Value> slots;
  };
  struct Frame {
    const minic::FunctionDef* function = nullptr;
    std::vector<Variable> vars;
    bool returned = false;
    std::vector<Value> result;
  };
  struct Stop {};

  std::vector<Value> invoke(const minic::FunctionDef& f, std::vector<std::vector<Value>> args);
  void exec_block(Frame& frame, const std::vector<minic::StmtPtr>& stmts);
  void exec(Frame& frame, const minic::Stmt& s);
  Value eval(Frame& frame, const minic::Expr& e);
  std::vector<Value> eval_value(Frame& frame, const minic::Expr& e);
  Variable& lookup(Frame& frame, const std::string& name);
  Value& element(Frame& frame, const minic::Expr& index_expr);
  void tick();
  void sample(Frame& frame, const minic::ProgramPoint& point);

  const minic::AnalyzedUnit& unit_;
  InterpreterConfig config_;
  PointObserver observer_;
  std::function<bool(const std::string&)> filter_;
  std::uint64_t steps_ = 0;
  int max_iterations_ = 0;
};

}  // namespace regsentry::trace
