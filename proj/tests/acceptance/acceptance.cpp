// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regsentry/bmc/checker.hpp"
#include "regsentry/infer/inference.hpp"
#include "regsentry/pipeline/pipeline.hpp"
#include "regsentry/sat/solver.hpp"
#include "support.hpp"

using namespace regsentry;
using infer::Status;
using pipeline::PipelineConfig;
using pipeline::Report;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Counterexamples produced by the pipeline runs below, replayed in criterion 6.
struct PendingReplay {
  std::string what;
  minic::AnalyzedUnit unit;
  infer::Property property;
  bmc::Counterexample cex;
  int width = 16;
  int unroll_bound = 5;
};
std::vector<PendingReplay> g_pending;
testing::ReplayTally g_oracle_tally;

void collect_replays(const std::string& label, const pipeline::Pipeline& p) {
  const auto& cfg = p.config();
  for (const auto& rec : p.report().properties) {
    const std::string what = label + " " + minic::to_string(rec.property.point) + " " + infer::to_text(rec.property.formula);
    if (rec.base_verdict && rec.base_verdict->kind == bmc::Verdict::Kind::Violated)
      g_pending.push_back({what + " (base)", p.versions().base, rec.property, *rec.base_verdict->counterexample,
                           cfg.bit_width, cfg.unroll_bound});
    if (rec.upgraded_verdict && rec.upgraded_verdict->kind == bmc::Verdict::Kind::Violated)
      g_pending.push_back({what + " (upgraded)", p.versions().upgraded, rec.property,
                           *rec.upgraded_verdict->counterexample, cfg.bit_width, cfg.unroll_bound});
  }
}

PipelineConfig load(const fs::path& conf, const std::string& scratch) {
  PipelineConfig cfg = pipeline::load_config(conf);
  cfg.output_dir = testing::scratch_dir("acceptance/" + scratch);
  return cfg;
}

const pipeline::PropertyRecord* find(const Report& r, const std::string& function, minic::PointKind kind, int ordinal,
                                     const std::string& formula) {
  for (const auto& rec : r.properties) {
    const auto& pt = rec.property.point;
    if (pt.function == function && pt.kind == kind && (kind != minic::PointKind::Loop || pt.ordinal == ordinal) &&
        infer::to_text(rec.property.formula) == formula)
      return &rec;
  }
  return nullptr;
}

std::string status_name(const pipeline::PropertyRecord* rec) {
  return rec ? infer::to_string(rec->property.status) : "missing";
}

Outcome running_example() {
  pipeline::Pipeline p(load(testing::data_dir() / "store" / "store.conf", "store"));
  p.phase1_generate();
  p.phase2_true();
  p.phase3_outdated();
  const Report& r = p.report();
  const auto* one_of = find(r, "is_available", minic::PointKind::Exit, 0, "return == 0 || return == 1");
  const auto* lower = find(r, "available_products", minic::PointKind::Exit, 0, "total >= 0");
  const std::string lower_after3 = status_name(lower);
  p.phase4_check();
  collect_replays("store", p);

  bool minus_one = false;
  if (lower && lower->upgraded_verdict && lower->upgraded_verdict->counterexample)
    for (const auto& step : lower->upgraded_verdict->counterexample->steps)
      for (const auto& [name, value] : step.bindings)
        if (name == "total" && value == -1) minus_one = true;

  Outcome o;
  o.pass = one_of && one_of->property.status == Status::Outdated && lower_after3 == "NON_REGRESSION" &&
           lower->property.status == Status::Violated && minus_one;
  o.detail = "OneOf " + status_name(one_of) + ", LowerBound " + lower_after3 + " then " + status_name(lower) +
             (minus_one ? ", total = -1 in counterexample" : ", no total = -1 step");
  return o;
}

Outcome overfit() {
  pipeline::Pipeline p(load(testing::data_dir() / "overfit" / "overfit.conf", "overfit"));
  p.phase1_generate();
  const bool emitted = find(p.report(), "price", minic::PointKind::Exit, 0, "return <= 25") != nullptr;
  p.phase2_true();
  const auto* rec = find(p.report(), "price", minic::PointKind::Exit, 0, "return <= 25");
  const bool discarded = rec && rec->property.status == Status::Discarded && rec->base_verdict &&
                         rec->base_verdict->kind == bmc::Verdict::Kind::Violated;
  p.phase3_outdated();
  p.phase4_check();
  collect_replays("overfit", p);
  rec = find(p.report(), "price", minic::PointKind::Exit, 0, "return <= 25");
  const bool never_nr = rec && rec->property.status == Status::Discarded;
  Outcome o;
  o.pass = emitted && discarded && never_nr;
  o.detail = std::string(emitted ? "emitted" : "not emitted") + ", " + (discarded ? "discarded VIOLATED" : "not discarded") +
             ", final " + status_name(rec);
  return o;
}

Outcome oracle_equivalence() {
  const auto programs = testing::oracle_programs();
  std::size_t disagreements = 0, valid = 0, violated = 0, props = 0;
  std::string first;
  std::uint32_t seed = 11;
  for (const auto& program : programs) {
    auto out = testing::compare_with_enumeration(program, seed++, g_oracle_tally);
    disagreements += out.disagreements.size();
    valid += out.valid;
    violated += out.violated;
    props += out.properties;
    if (first.empty() && !out.disagreements.empty()) first = out.disagreements.front();
  }
  Outcome o;
  o.pass = programs.size() >= 20 && disagreements == 0;
  o.detail = std::to_string(programs.size()) + " programs, " + std::to_string(props) + " properties (" +
             std::to_string(valid) + " valid, " + std::to_string(violated) + " violated), " +
             std::to_string(disagreements) + " disagreements" + (first.empty() ? "" : "; first: " + first);
  return o;
}

Outcome sat_oracle() {
  std::mt19937 rng(77);
  int disagreements = 0, sat = 0, total = 0;
  for (int i = 0; i < 300; ++i, ++total) {
    sat::Cnf cnf;
    cnf.num_vars = 1 + i % 20;
    const int clauses = static_cast<int>(cnf.num_vars * (1.0 + (i % 8) * 0.7)) + 1;
    std::uniform_int_distribution<int> var(1, cnf.num_vars), len(2, 3), sign(0, 1);
    for (int c = 0; c < clauses; ++c) {
      std::vector<int> clause;
      for (int k = len(rng); k > 0; --k) clause.push_back(sign(rng) ? var(rng) : -var(rng));
      cnf.clauses.push_back(clause);
    }
    auto satisfied = [&](std::uint32_t a) {
      for (const auto& clause : cnf.clauses) {
        bool any = false;
        for (int lit : clause) any = any || (((a >> (std::abs(lit) - 1)) & 1U) == (lit > 0 ? 1U : 0U));
        if (!any) return false;
      }
      return true;
    };
    bool expected = false;
    for (std::uint32_t a = 0; a < (1U << cnf.num_vars) && !expected; ++a) expected = satisfied(a);
    const auto r = sat::solve(cnf);
    bool ok = (r.result == sat::Result::Sat) == expected && r.result != sat::Result::Unknown;
    if (ok && r.result == sat::Result::Sat) {
      std::uint32_t a = 0;
      for (std::size_t v = 0; v < r.model.size(); ++v)
        if (r.model[v]) a |= 1U << v;
      ok = satisfied(a);
    }
    sat += expected;
    disagreements += !ok;
  }
  Outcome o;
  o.pass = disagreements == 0;
  o.detail = std::to_string(total) + " CNFs (" + std::to_string(sat) + " sat), " + std::to_string(disagreements) +
             " disagreements";
  return o;
}

Outcome inference_soundness() {
  std::mt19937 rng(5150);
  std::size_t checks = 0, failures = 0;
  for (int round = 0; round < 60; ++round) {
    const int width = round % 3 == 0 ? 8 : 16;
    auto unit = testing::analyze_text(testing::random_program(rng));
    const std::string entry = unit.unit().functions.back().name;
    std::vector<testing::Args> inputs;
    for (int i = 0; i < 12; ++i) inputs.push_back(testing::random_args(unit, entry, width, rng));
    trace::TraceLog log = testing::trace_calls(unit, entry, inputs, width);
    for (const auto& p : infer::infer(log, testing::whole_scope(unit))) {
      const int idx = log.find_point(p.point);
      for (const auto& s : log.samples) {
        if (idx < 0 || s.point != idx) continue;
        ++checks;
        if (!infer::holds(p, trace::SampleView(log.points[static_cast<std::size_t>(idx)], s), width)) ++failures;
      }
    }
  }
  Outcome o;
  o.pass = checks >= 10000 && failures == 0;
  o.detail = std::to_string(checks) + " property-sample checks, " + std::to_string(failures) + " failures";
  return o;
}

Outcome counterexample_replay() {
  std::size_t failures = g_oracle_tally.replay_failures;
  std::string first;
  for (const auto& r : g_pending) {
    const auto res = bmc::replay(r.unit, r.property, r.cex, r.width);
    if (!res.falsified || res.max_loop_iterations > r.unroll_bound) {
      ++failures;
      if (first.empty()) first = r.what;
    }
  }
  Outcome o;
  const std::size_t total = g_oracle_tally.violated + g_pending.size();
  o.pass = failures == 0 && total > 0;
  o.detail = std::to_string(total) + " violated verdicts (" + std::to_string(g_pending.size()) + " from pipeline runs), " +
             std::to_string(failures) + " replay failures" + (first.empty() ? "" : "; first: " + first);
  return o;
}

std::string read_expect(const fs::path& dir) {
  std::ifstream in(dir / "expect");
  std::string line;
  std::getline(in, line);
  return line;
}

Outcome precision() {
  const fs::path corpus = testing::data_dir() / "corpus";
  std::vector<fs::path> preserve, regress;
  for (const auto& e : fs::directory_iterator(corpus / "preserve")) preserve.push_back(e.path());
  for (const auto& e : fs::directory_iterator(corpus / "regress")) regress.push_back(e.path());
  std::sort(preserve.begin(), preserve.end());
  std::sort(regress.begin(), regress.end());

  std::size_t false_alarms = 0, identical_alarms = 0, detected = 0, identical = 0;
  std::vector<std::string> notes;
  auto run = [&](const fs::path& dir, bool same) {
    PipelineConfig cfg = load(dir / "pair.conf", (same ? "same_" : "") + dir.filename().string());
    if (same) cfg.upgraded_dir = cfg.base_dir;
    pipeline::Pipeline p(cfg, {1, false, pipeline::Format::Json, true});
    p.run();
    collect_replays(dir.filename().string(), p);
    return p.report();
  };

  std::vector<fs::path> identical_dirs = preserve;
  identical_dirs.insert(identical_dirs.end(), regress.begin(), regress.end());
  for (const auto& dir : identical_dirs) {
    ++identical;
    if (run(dir, true).count(Status::Violated) > 0) {
      ++identical_alarms;
      notes.push_back(dir.filename().string() + " identical");
    }
  }
  for (const auto& dir : preserve) {
    const Report r = run(dir, false);
    if (r.count(Status::Violated) > 0) {
      ++false_alarms;
      notes.push_back(dir.filename().string() + " false alarm");
    }
  }
  for (const auto& dir : regress) {
    std::istringstream expect(read_expect(dir));
    std::string word, function, kind;
    int ordinal = 0;
    expect >> word >> function >> kind;
    const minic::PointKind k = kind == "LOOP" ? minic::PointKind::Loop : kind == "ENTRY" ? minic::PointKind::Entry
                                                                                        : minic::PointKind::Exit;
    if (k == minic::PointKind::Loop) expect >> ordinal;
    std::string formula;
    std::getline(expect >> std::ws, formula);
    const Report r = run(dir, false);
    const auto* rec = find(r, function, k, ordinal, formula);
    if (rec && rec->property.status == Status::Violated)
      ++detected;
    else
      notes.push_back(dir.filename().string() + " missed (" + status_name(rec) + ")");
  }
  Outcome o;
  o.pass = preserve.size() >= 10 && regress.size() >= 10 && false_alarms == 0 && identical_alarms == 0 &&
           detected == regress.size();
  o.detail = std::to_string(preserve.size()) + " preserving pairs with " + std::to_string(false_alarms) +
             " violations, " + std::to_string(identical) + " identical pairs with " + std::to_string(identical_alarms) +
             " violations, " + std::to_string(detected) + "/" + std::to_string(regress.size()) + " seeded faults";
  for (const auto& n : notes) o.detail += "; " + n;
  return o;
}

Outcome determinism() {
  auto once = [] {
    PipelineConfig cfg = load(testing::data_dir() / "store" / "store.conf", "determinism");
    pipeline::Pipeline p(cfg);
    p.run();
    pipeline::Json j = p.to_json();
    j["metadata"].erase("timestamp");
    return j.dump(2);
  };
  const std::string a = once(), b = once();
  Outcome o;
  o.pass = a == b;
  o.detail = a == b ? "reports identical (" + std::to_string(a.size()) + " bytes)" : "reports differ";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    double limit_s;  // zero: no time limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "running example", 10, running_example},
      {2, "overfit elimination", 5, overfit},
      {3, "BMC oracle equivalence", 120, oracle_equivalence},
      {4, "SAT core oracle", 60, sat_oracle},
      {5, "inference soundness", 0, inference_soundness},
      {7, "precision on version pairs", 180, precision},
      {8, "determinism", 0, determinism},
      {6, "counterexample replay", 0, counterexample_replay},
  };
  std::vector<std::string> lines(9);
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the time limit";
    }
    char time[32];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    lines[static_cast<std::size_t>(c.number)] = std::string(o.pass ? "PASS" : "FAIL") + " criterion " +
                                                std::to_string(c.number) + " " + c.name + " [" + time + "]: " + o.detail;
    all = all && o.pass;
  }
  for (std::size_t i = 1; i < lines.size(); ++i) std::cout << lines[i] << "\n";
  return all ? 0 : 1;
}
