#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace regsentry::sat {

using Var = int;

/// Literal encoded as 2*var + sign, sign 1 meaning negated.
struct Lit {
  int code = 0;

  static Lit make(Var v, bool negated = false) { return Lit{2 * v + (negated ? 1 : 0)}; }
  Var var() const { return code >> 1; }
  bool negated() const { return code & 1; }
  Lit operator~() const { return Lit{code ^ 1}; }

  friend bool operator==(Lit, Lit) = default;
};

enum class Result { Sat, Unsat, Unknown };
const char* to_string(Result r);

/// Limits for one solve call. Negative or zero values mean unlimited.
struct Budget {
  std::int64_t max_conflicts = -1;
  std::int64_t max_decisions = -1;
  std::chrono::milliseconds timeout{0};
};

struct Stats {
  std::int64_t conflicts = 0;
  std::int64_t decisions = 0;
  std::int64_t propagations = 0;
  std::int64_t restarts = 0;
};

/// CDCL solver: two watched literals, first-UIP learning with clause
/// minimization, VSIDS branching with phase saving, Luby restarts.
class Solver {
 public:
  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Adds a clause at decision level 0. Returns false once the formula is
  /// known to be unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  Result solve(const Budget& budget = {});

  /// Value of `v` in the last satisfying assignment.
  bool model_value(Var v) const { return model_[static_cast<std::size_t>(v)]; }
  const std::vector<bool>& model() const { return model_; }
  const Stats& stats() const { return stats_; }

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
  };
  struct Watcher {
    int clause;
    Lit blocker;
  };

  std::int8_t value(Lit l) const {
    std::int8_t a = assigns_[static_cast<std::size_t>(l.var())];
    return l.negated() ? static_cast<std::int8_t>(-a) : a;
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  bool redundant(Lit l, std::uint32_t abstract_levels);
  void backtrack(int level);
  void attach(int clause);
  Lit pick_branch();
  void bump(Var v);
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  Var heap_pop();

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Var> heap_;
  std::vector<int> heap_index_;
  std::vector<char> seen_;
  std::vector<Lit> analyze_stack_;
  std::vector<Lit> analyze_clear_;
  double var_inc_ = 1.0;
  bool ok_ = true;
  std::vector<bool> model_;
  Stats stats_;
};

/// Clause list in DIMACS integer convention (variables numbered from 1,
/// negative means negated).
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

struct CnfResult {
  Result result = Result::Unknown;
  std::vector<bool> model;  // index v-1 holds variable v
  Stats stats;
};

CnfResult solve(const Cnf& cnf, const Budget& budget = {});

std::string to_dimacs(const Cnf& cnf, const std::vector<std::string>& comments = {});
/// Throws regsentry::Error on malformed input.
Cnf parse_dimacs(const std::string& text);

}  // namespace regsentry::sat
