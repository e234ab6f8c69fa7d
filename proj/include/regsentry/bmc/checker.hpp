#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regsentry/bmc/vc.hpp"

namespace regsentry::bmc {

enum class SolveStatus { Sat, Unsat, BudgetExceeded };
const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::BudgetExceeded;
  std::vector<bool> inputs;  // value of every AIG input when Sat
  sat::Stats stats;
};

/// Bit-blasts the cone of `formula` and decides it.
SolveResult solve(const Aig& aig, AigLit formula, const sat::Budget& budget);

/// DIMACS text of the query for `formula`, with comments naming the input
/// bits of `vc`.
std::string query_dimacs(const VcSet& vc, AigLit formula, const std::string& title);

struct CounterexampleStep {
  OriginalLine at;
  std::string function;
  std::string text;  // original source line, leading whitespace removed
  std::vector<std::pair<std::string, minic::Value>> bindings;
  bool violation = false;
};

struct Counterexample {
  std::string entry;
  std::vector<std::pair<std::string, minic::Value>> inputs;  // flattened names
  std::vector<std::vector<minic::Value>> arguments;          // per parameter
  std::vector<CounterexampleStep> steps;
  std::size_t property = 0;
};

struct Verdict {
  enum class Kind { Valid, Violated, Unknown };

  Kind kind = Kind::Unknown;
  /// For Unknown: "budget", "unsupported-construct", "unreached",
  /// "unwinding" or "unmappable".
  std::string reason;
  std::string entry;
  std::optional<Counterexample> counterexample;
  sat::Stats stats;
};

const char* to_string(Verdict::Kind k);

struct CheckOptions {
  int parallelism = 1;
  /// Receives (entry, property index, DIMACS text) of every SAT query.
  std::function<void(const std::string&, std::size_t, const std::string&)> cnf_sink;
  /// Replay every counterexample through the interpreter and throw Error
  /// when it does not falsify the property.
  bool self_check = true;
};

/// Verdict per property of `iu` from a single entry. Unmappable properties
/// get Unknown("unmappable").
std::vector<Verdict> check(const InstrumentedUnit& iu, const std::string& entry, const BmcConfig& cfg,
                           const CheckOptions& options = {});

/// Combines several entries: Violated from any entry wins (first entry in
/// the given order), then Unknown(budget/unsupported-construct), then Valid
/// if some entry reached the property, else Unknown("unreached").
std::vector<Verdict> check_entries(const InstrumentedUnit& iu, const std::vector<std::string>& entries,
                                   const BmcConfig& cfg, const CheckOptions& options = {});

struct ReplayResult {
  bool falsified = false;
  int max_loop_iterations = 0;
  std::string error;  // runtime fault raised during replay, if any
};

/// Runs the counterexample inputs through the interpreter on the original
/// program and reports whether the property is falsified at its point.
ReplayResult replay(const minic::AnalyzedUnit& unit, const infer::Property& p, const Counterexample& cex,
                    int width);

}  // namespace regsentry::bmc
