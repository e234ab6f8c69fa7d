#include <doctest.h>

#include <random>

#include "regsentry/error.hpp"
#include "regsentry/sat/solver.hpp"

using namespace regsentry;
using namespace regsentry::sat;

namespace {

Cnf random_cnf(std::mt19937& rng, int vars, int clauses, int max_len) {
  Cnf cnf;
  cnf.num_vars = vars;
  std::uniform_int_distribution<int> var(1, vars), len(std::min(2, max_len), max_len), sign(0, 1);
  for (int c = 0; c < clauses; ++c) {
    std::vector<int> clause;
    for (int k = len(rng); k > 0; --k) clause.push_back(sign(rng) ? var(rng) : -var(rng));
    cnf.clauses.push_back(clause);
  }
  return cnf;
}

bool satisfies(const Cnf& cnf, std::uint32_t assignment) {
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const bool value = (assignment >> (std::abs(lit) - 1)) & 1U;
      sat = sat || (lit > 0 ? value : !value);
    }
    if (!sat) return false;
  }
  return true;
}

bool truth_table_sat(const Cnf& cnf) {
  for (std::uint32_t a = 0; a < (1U << cnf.num_vars); ++a)
    if (satisfies(cnf, a)) return true;
  return false;
}

std::uint32_t pack(const std::vector<bool>& model) {
  std::uint32_t a = 0;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (model[i]) a |= 1U << i;
  return a;
}

Cnf pigeonhole(int holes) {
  const int pigeons = holes + 1;
  Cnf cnf;
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  cnf.num_vars = pigeons * holes;
  for (int p = 0; p < pigeons; ++p) {
    std::vector<int> c;
    for (int h = 0; h < holes; ++h) c.push_back(var(p, h));
    cnf.clauses.push_back(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) cnf.clauses.push_back({-var(p, h), -var(q, h)});
  return cnf;
}

}  // namespace

TEST_CASE("x and not x is unsatisfiable") {
  Cnf cnf;
  cnf.num_vars = 1;
  cnf.clauses = {{1}, {-1}};
  CHECK(solve(cnf).result == Result::Unsat);
}

TEST_CASE("empty formula and empty clause") {
  Cnf empty;
  empty.num_vars = 3;
  CHECK(solve(empty).result == Result::Sat);
  Cnf bad;
  bad.num_vars = 1;
  bad.clauses = {{}};
  CHECK(solve(bad).result == Result::Unsat);
}

TEST_CASE("random CNFs agree with truth tables") {
  std::mt19937 rng(1234);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 400; ++i) {
    const int vars = 1 + i % 20;
    // Clause/variable ratios from 1.5 to 5.1 straddle the 3-SAT threshold.
    const int clauses = std::max(1, static_cast<int>(vars * (1.5 + (i % 7) * 0.6)));
    Cnf cnf = random_cnf(rng, vars, clauses, 3);
    CnfResult r = solve(cnf);
    const bool expected = truth_table_sat(cnf);
    REQUIRE(r.result != Result::Unknown);
    CHECK((r.result == Result::Sat) == expected);
    if (r.result == Result::Sat) {
      CHECK(satisfies(cnf, pack(r.model)));
      ++sat;
    } else {
      ++unsat;
    }
  }
  CHECK(sat > 50);
  CHECK(unsat > 50);
}

TEST_CASE("incremental clause addition") {
  Solver s;
  Var a = s.new_var(), b = s.new_var();
  CHECK(s.add_clause({Lit::make(a), Lit::make(b)}));
  CHECK(s.solve() == Result::Sat);
  CHECK((s.model_value(a) || s.model_value(b)));
  s.add_clause({Lit::make(a, true)});
  CHECK(s.solve() == Result::Sat);
  CHECK(s.model_value(b));
  s.add_clause({Lit::make(b, true)});
  CHECK(s.solve() == Result::Unsat);
}

TEST_CASE("pigeonhole: unsat, and a tiny budget gives up") {
  CHECK(solve(pigeonhole(5)).result == Result::Unsat);
  Budget tiny;
  tiny.max_conflicts = 5;
  CnfResult r = solve(pigeonhole(8), tiny);
  CHECK(r.result == Result::Unknown);
  CHECK(r.stats.conflicts <= 6);
  Budget decisions;
  decisions.max_decisions = 3;
  CHECK(solve(pigeonhole(8), decisions).result == Result::Unknown);
}

TEST_CASE("DIMACS round trip and errors") {
  std::mt19937 rng(3);
  Cnf cnf = random_cnf(rng, 12, 40, 4);
  Cnf back = parse_dimacs(to_dimacs(cnf, {"a comment"}));
  CHECK(back.num_vars == cnf.num_vars);
  CHECK(back.clauses == cnf.clauses);
  CHECK(to_dimacs(cnf).rfind("p cnf 12 40", 0) == 0);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 3 0\n"), Error);
  CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0\n"), Error);
}
