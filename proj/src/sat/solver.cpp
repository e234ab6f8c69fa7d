#include "regsentry/sat/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "regsentry/error.hpp"

namespace regsentry::sat {

const char* to_string(Result r) {
  switch (r) {
    case Result::Sat: return "SAT";
    case Result::Unsat: return "UNSAT";
    case Result::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

// Luby sequence scaled by powers of y.
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    seq++;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

constexpr int kNoReason = -1;

}  // namespace

Var Solver::new_var() {
  Var v = num_vars();
  assigns_.push_back(0);
  levels_.push_back(-1);
  reasons_.push_back(kNoReason);
  phase_.push_back(false);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.resize(static_cast<std::size_t>(2 * (v + 1)));
  heap_index_.push_back(-1);
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return false;
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.code < b.code; });
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    Lit l = lits[i];
    if (i > 0 && l == lits[i - 1]) continue;
    if (i > 0 && l == ~lits[i - 1]) return true;  // tautology
    std::int8_t v = value(l);
    if (v == 1 && levels_[static_cast<std::size_t>(l.var())] == 0) return true;
    if (v == -1 && levels_[static_cast<std::size_t>(l.var())] == 0) continue;
    kept.push_back(l);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  clauses_.push_back(Clause{std::move(kept), false});
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void Solver::attach(int clause) {
  const auto& lits = clauses_[static_cast<std::size_t>(clause)].lits;
  watches_[static_cast<std::size_t>(lits[0].code)].push_back({clause, lits[1]});
  watches_[static_cast<std::size_t>(lits[1].code)].push_back({clause, lits[0]});
}

void Solver::enqueue(Lit l, int reason) {
  const auto v = static_cast<std::size_t>(l.var());
  assigns_[v] = l.negated() ? -1 : 1;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  int conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    auto& ws = watches_[static_cast<std::size_t>(false_lit.code)];
    ++stats_.propagations;
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& lits = clauses_[static_cast<std::size_t>(w.clause)].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;
      const Lit first = lits[0];
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = {w.clause, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != -1) {
          std::swap(lits[1], lits[k]);
          watches_[static_cast<std::size_t>(lits[1].code)].push_back({w.clause, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.clause, first};
      if (value(first) == -1) {
        conflict = w.clause;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.clause);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

bool Solver::redundant(Lit l, std::uint32_t abstract_levels) {
  // Recursive minimization: l is redundant if its reason's literals are all
  // already in the clause or themselves redundant.
  analyze_stack_.clear();
  analyze_stack_.push_back(l);
  const std::size_t top = analyze_clear_.size();
  while (!analyze_stack_.empty()) {
    Lit q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const auto& c = clauses_[static_cast<std::size_t>(reasons_[static_cast<std::size_t>(q.var())])].lits;
    for (std::size_t i = 1; i < c.size(); ++i) {
      Lit r = c[i];
      const auto v = static_cast<std::size_t>(r.var());
      if (seen_[v] || levels_[v] == 0) continue;
      if (reasons_[v] != kNoReason && (abstract_levels & (1u << (levels_[v] & 31)))) {
        seen_[v] = 1;
        analyze_stack_.push_back(r);
        analyze_clear_.push_back(r);
      } else {
        for (std::size_t k = top; k < analyze_clear_.size(); ++k)
          seen_[static_cast<std::size_t>(analyze_clear_[k].var())] = 0;
        analyze_clear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

void Solver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(Lit{});
  int pending = 0;
  bool have_p = false;
  Lit p;
  std::size_t index = trail_.size();
  do {
    const auto& c = clauses_[static_cast<std::size_t>(conflict)].lits;
    for (std::size_t j = have_p ? 1 : 0; j < c.size(); ++j) {
      Lit q = c[j];
      const auto v = static_cast<std::size_t>(q.var());
      if (!seen_[v] && levels_[v] > 0) {
        bump(q.var());
        seen_[v] = 1;
        if (levels_[v] >= level())
          ++pending;
        else
          learnt.push_back(q);
      }
    }
    do {
      --index;
    } while (!seen_[static_cast<std::size_t>(trail_[index].var())]);
    p = trail_[index];
    have_p = true;
    conflict = reasons_[static_cast<std::size_t>(p.var())];
    seen_[static_cast<std::size_t>(p.var())] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = ~p;

  analyze_clear_.assign(learnt.begin(), learnt.end());
  std::uint32_t abstract_levels = 0;
  for (std::size_t i = 1; i < learnt.size(); ++i)
    abstract_levels |= 1u << (levels_[static_cast<std::size_t>(learnt[i].var())] & 31);
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const auto v = static_cast<std::size_t>(learnt[i].var());
    if (reasons_[v] == kNoReason || !redundant(learnt[i], abstract_levels))
      learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (levels_[static_cast<std::size_t>(learnt[i].var())] >
          levels_[static_cast<std::size_t>(learnt[max_i].var())])
        max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = levels_[static_cast<std::size_t>(learnt[1].var())];
  }
  for (Lit l : analyze_clear_) seen_[static_cast<std::size_t>(l.var())] = 0;
}

void Solver::backtrack(int target) {
  if (level() <= target) return;
  const std::size_t stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(target)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const auto v = static_cast<std::size_t>(trail_[i].var());
    phase_[v] = assigns_[v] == 1;
    assigns_[v] = 0;
    reasons_[v] = kNoReason;
    levels_[v] = -1;
    if (heap_index_[v] < 0) heap_insert(static_cast<Var>(v));
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(target));
  qhead_ = trail_.size();
}

void Solver::bump(Var v) {
  const auto i = static_cast<std::size_t>(v);
  activity_[i] += var_inc_;
  if (activity_[i] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_index_[i] >= 0) heap_up(static_cast<std::size_t>(heap_index_[i]));
}

void Solver::heap_insert(Var v) {
  heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  Var v = heap_[i];
  double a = activity_[static_cast<std::size_t>(v)];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (activity_[static_cast<std::size_t>(heap_[parent])] >= a) break;
    heap_[i] = heap_[parent];
    heap_index_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
  Var v = heap_[i];
  double a = activity_[static_cast<std::size_t>(v)];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && activity_[static_cast<std::size_t>(heap_[child + 1])] >
                                        activity_[static_cast<std::size_t>(heap_[child])])
      ++child;
    if (activity_[static_cast<std::size_t>(heap_[child])] <= a) break;
    heap_[i] = heap_[child];
    heap_index_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

Var Solver::heap_pop() {
  Var top = heap_.front();
  heap_index_[static_cast<std::size_t>(top)] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[static_cast<std::size_t>(v)] == 0)
      return Lit::make(v, !phase_[static_cast<std::size_t>(v)]);
  }
  return Lit{-1};
}

Result Solver::solve(const Budget& budget) {
  model_.clear();
  if (!ok_) return Result::Unsat;
  if (propagate() != kNoReason) {
    ok_ = false;
    return Result::Unsat;
  }
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t conflicts_at_start = stats_.conflicts;
  const std::int64_t decisions_at_start = stats_.decisions;
  std::vector<Lit> learnt;
  std::uint64_t iterations = 0;

  for (int restart = 0;; ++restart) {
    const auto limit = static_cast<std::int64_t>(luby(2.0, restart) * 100);
    std::int64_t conflicts_here = 0;
    for (;;) {
      int conflict = propagate();
      if (conflict != kNoReason) {
        ++stats_.conflicts;
        ++conflicts_here;
        if (level() == 0) {
          ok_ = false;
          return Result::Unsat;
        }
        if (budget.max_conflicts > 0 && stats_.conflicts - conflicts_at_start > budget.max_conflicts) {
          backtrack(0);
          return Result::Unknown;
        }
        int bt = 0;
        analyze(conflict, learnt, bt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses_.push_back(Clause{learnt, true});
          int idx = static_cast<int>(clauses_.size()) - 1;
          attach(idx);
          enqueue(learnt[0], idx);
        }
        var_inc_ /= 0.95;
        continue;
      }
      bool out_of_budget =
          (budget.max_decisions > 0 && stats_.decisions - decisions_at_start >= budget.max_decisions);
      if (!out_of_budget && budget.timeout.count() > 0 && (++iterations & 255) == 0)
        out_of_budget = std::chrono::steady_clock::now() - start > budget.timeout;
      if (conflicts_here >= limit && !out_of_budget) {
        ++stats_.restarts;
        backtrack(0);
        break;
      }
      Lit next = pick_branch();
      if (next.code < 0) {
        model_.resize(assigns_.size());
        for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == 1;
        backtrack(0);
        return Result::Sat;
      }
      if (out_of_budget) {
        backtrack(0);
        return Result::Unknown;
      }
      ++stats_.decisions;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(next, kNoReason);
    }
  }
}

CnfResult solve(const Cnf& cnf, const Budget& budget) {
  Solver s;
  for (int i = 0; i < cnf.num_vars; ++i) s.new_var();
  for (const auto& c : cnf.clauses) {
    std::vector<Lit> lits;
    for (int x : c) {
      int v = std::abs(x) - 1;
      if (v >= cnf.num_vars) throw Error("clause mentions variable beyond declared count");
      lits.push_back(Lit::make(v, x < 0));
    }
    s.add_clause(std::move(lits));
  }
  CnfResult out;
  out.result = s.solve(budget);
  if (out.result == Result::Sat) out.model = s.model();
  out.stats = s.stats();
  return out;
}

std::string to_dimacs(const Cnf& cnf, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "c " << c << "\n";
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << "\n";
  for (const auto& clause : cnf.clauses) {
    for (int x : clause) out << x << ' ';
    out << "0\n";
  }
  return out.str();
}

Cnf parse_dimacs(const std::string& text) {
  Cnf cnf;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t declared = 0;
  std::vector<int> clause;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> cnf.num_vars >> declared) || fmt != "cnf")
        throw Error("malformed DIMACS header");
      header = true;
      continue;
    }
    if (!header) throw Error("DIMACS clause before header");
    std::istringstream ws(line);
    int x;
    while (ws >> x) {
      if (x == 0) {
        cnf.clauses.push_back(clause);
        clause.clear();
      } else {
        if (std::abs(x) > cnf.num_vars) throw Error("DIMACS literal out of range");
        clause.push_back(x);
      }
    }
    if (!ws.eof()) throw Error("malformed DIMACS literal in '" + line + "'");
  }
  if (!header) throw Error("missing DIMACS header");
  if (!clause.empty()) cnf.clauses.push_back(clause);
  return cnf;
}

}  // namespace regsentry::sat
