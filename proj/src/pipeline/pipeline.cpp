#include "regsentry/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "regsentry/bmc/instrument.hpp"
#include "regsentry/error.hpp"
#include "regsentry/infer/inference.hpp"
#include "regsentry/minic/parser.hpp"

namespace regsentry::pipeline {

namespace fs = std::filesystem;
using infer::Status;

std::size_t Report::count(Status s) const {
  return static_cast<std::size_t>(std::count_if(properties.begin(), properties.end(),
                                                [&](const PropertyRecord& r) { return r.property.status == s; }));
}

int Report::exit_status() const { return count(Status::Violated) > 0 ? 1 : 0; }

Versions load_versions(const PipelineConfig& cfg) {
  auto load = [&](const fs::path& dir) {
    std::vector<minic::SourceUnit> units;
    for (const auto& p : list_sources(dir, cfg.sources)) units.push_back(minic::parse_file(p.string()));
    return minic::analyze(minic::merge(std::move(units)));
  };
  return Versions{load(cfg.base_dir), load(cfg.upgraded_dir)};
}

std::vector<bmc::OriginalLine> anchor_lines(const minic::AnalyzedUnit& unit, const minic::ProgramPoint& point) {
  const minic::FunctionDef* f = unit.find_function(point.function);
  if (!f) return {};
  std::vector<bmc::OriginalLine> out;
  auto at = [](const minic::Span& s) { return bmc::OriginalLine{s.file, s.line}; };
  if (point.kind == minic::PointKind::Entry) return {at(f->span)};
  std::function<void(const std::vector<minic::StmtPtr>&)> walk = [&](const std::vector<minic::StmtPtr>& stmts) {
    for (const auto& s : stmts) {
      if (point.kind == minic::PointKind::Loop && s->kind == minic::Stmt::Kind::While &&
          s->ordinal == point.ordinal)
        out.push_back(at(s->span));
      if (point.kind == minic::PointKind::Exit && s->kind == minic::Stmt::Kind::Return) out.push_back(at(s->span));
      walk(s->body);
      walk(s->else_body);
    }
  };
  walk(f->body);
  if (point.kind == minic::PointKind::Exit && !minic::definitely_returns(f->body))
    out.push_back(f->body.empty() ? at(f->span) : at(f->body.back()->span));
  return out;
}

namespace {

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename Fn>
void in_phase(int n, const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error("phase " + std::to_string(n) + " (" + name + "): " + e.what());
  }
}

Json names(const std::set<std::string>& s) { return Json(std::vector<std::string>(s.begin(), s.end())); }

std::set<std::string> name_set(const Json& j) {
  std::set<std::string> out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

Json bindings_json(const std::vector<std::pair<std::string, minic::Value>>& bindings) {
  Json j = Json::object();
  for (const auto& [name, value] : bindings) j[name] = value;
  return j;
}

std::vector<std::pair<std::string, minic::Value>> bindings_from(const Json& j) {
  std::vector<std::pair<std::string, minic::Value>> out;
  for (const auto& [k, v] : j.items()) out.emplace_back(k, v.get<minic::Value>());
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, RunOptions options) : cfg_(std::move(cfg)), options_(options) {
  if (options_.resume_from < 1 || options_.resume_from > 4) throw ConfigError("--resume-from expects 1..4");
  validate(cfg_);
  in_phase(1, "generate", [&] { versions_ = load_versions(cfg_); });
}

std::string Pipeline::display_path(int file, bool upgraded) const {
  const auto& files = (upgraded ? versions_.upgraded : versions_.base).unit().files;
  if (file < 0 || file >= static_cast<int>(files.size())) return "?";
  fs::path p = fs::path(files[static_cast<std::size_t>(file)].path).lexically_normal();
  fs::path rel = p.lexically_relative(fs::path(cfg_.root).lexically_normal());
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

void Pipeline::ensure_tests() {
  if (!base_tests_) {
    base_tests_ = trace::load_manifest(cfg_.tests_base.string(), trace::Suite::Base);
    if (base_tests_->empty()) throw ConfigError("tests_base manifest '" + cfg_.tests_base.string() + "' is empty");
  }
  if (!upgrade_tests_) {
    upgrade_tests_ = cfg_.tests_upgrade.empty()
                         ? std::vector<trace::TestCase>{}
                         : trace::load_manifest(cfg_.tests_upgrade.string(), trace::Suite::Upgrade);
  }
}

bmc::CheckOptions Pipeline::check_options(const std::string& phase) const {
  bmc::CheckOptions opts;
  opts.parallelism = cfg_.parallelism;
  if (options_.emit_cnf && options_.write_files) {
    fs::path dir = cfg_.output_dir / "cnf";
    fs::create_directories(dir);
    opts.cnf_sink = [dir, phase](const std::string& entry, std::size_t index, const std::string& text) {
      write_file(dir / (phase + "-" + entry + "-" + std::to_string(index) + ".cnf"), text);
    };
  }
  return opts;
}

void Pipeline::phase1_generate() {
  in_phase(1, "generate", [&] {
    ensure_tests();
    report_ = Report{};
    for (const auto& t : *base_tests_) report_.tests_base.push_back(t.name);
    for (const auto& t : *upgrade_tests_) report_.tests_upgrade.push_back(t.name);
    report_.change_set = change::diff(versions_.base, versions_.upgraded);
    if (report_.change_set.empty()) {
      report_.no_change = true;
      report_.phases_completed = 4;
      return;
    }
    report_.scope = change::scope(report_.change_set, versions_.base, versions_.upgraded);
    trace::TraceLog log = trace::run_suite(versions_.base.unit(), *base_tests_, report_.scope.monitored,
                                           trace::Version::Base, {cfg_.bit_width, cfg_.step_budget},
                                           cfg_.parallelism);
    if (options_.write_files) trace::write_trace(log, (cfg_.output_dir / "base.trace").string());
    for (auto& p : infer::infer(log, report_.scope, cfg_.min_support))
      report_.properties.push_back(PropertyRecord{std::move(p), {}, {}, {}});
    report_.phases_completed = 1;
  });
  write_properties("dynamic.props", Status::Dynamic);
  save_state();
}

void Pipeline::phase2_true() {
  in_phase(2, "true properties", [&] {
    std::vector<infer::Property> props;
    for (const auto& r : report_.properties) props.push_back(r.property);
    bmc::InstrumentedUnit iu = bmc::instrument(versions_.base, props);
    std::vector<std::string> entries(report_.scope.base_entries.begin(), report_.scope.base_entries.end());
    std::vector<bmc::Verdict> verdicts = bmc::check_entries(iu, entries, cfg_.bmc(), check_options("base"));
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      PropertyRecord& r = report_.properties[i];
      r.property.status = verdicts[i].kind == bmc::Verdict::Kind::Valid ? Status::True : Status::Discarded;
      r.base_verdict = std::move(verdicts[i]);
    }
    report_.phases_completed = 2;
  });
  write_properties("true.props", Status::True);
  write_properties("discarded.props", Status::Discarded);
  save_state();
}

void Pipeline::phase3_outdated() {
  in_phase(3, "outdated filtering", [&] {
    ensure_tests();
    trace::TraceLog log;
    log.version = trace::Version::Upgraded;
    log.width = cfg_.bit_width;
    if (!upgrade_tests_->empty()) {
      log = trace::run_suite(versions_.upgraded.unit(), *upgrade_tests_, report_.scope.monitored,
                             trace::Version::Upgraded, {cfg_.bit_width, cfg_.step_budget}, cfg_.parallelism);
    }
    if (options_.write_files) trace::write_trace(log, (cfg_.output_dir / "upgraded.trace").string());
    for (auto& r : report_.properties) {
      if (r.property.status != Status::True) continue;
      if (!bmc::mappable(r.property, versions_.upgraded)) {
        r.property.status = Status::Unmappable;
        continue;
      }
      r.property.status = Status::NonRegression;
      const int idx = log.find_point(r.property.point);
      if (idx < 0) continue;
      const trace::PointSchema& schema = log.points[static_cast<std::size_t>(idx)];
      for (const auto& s : log.samples) {
        if (s.point != idx) continue;
        if (infer::holds(r.property, trace::SampleView(schema, s), cfg_.bit_width)) continue;
        OutdatedEvidence ev{s.test, s.sequence, {}};
        for (std::size_t k = 0; k < schema.variables.size(); ++k)
          ev.bindings.emplace_back(schema.variables[k], s.values[k]);
        r.outdated_by = std::move(ev);
        r.property.status = Status::Outdated;
        break;
      }
    }
    report_.phases_completed = 3;
  });
  write_properties("outdated.props", Status::Outdated);
  write_properties("non_regression.props", Status::NonRegression);
  save_state();
}

void Pipeline::phase4_check() {
  in_phase(4, "regression check", [&] {
    std::vector<std::size_t> index;
    std::vector<infer::Property> props;
    for (std::size_t i = 0; i < report_.properties.size(); ++i)
      if (report_.properties[i].property.status == Status::NonRegression) {
        index.push_back(i);
        props.push_back(report_.properties[i].property);
      }
    bmc::InstrumentedUnit iu = bmc::instrument(versions_.upgraded, props);
    std::vector<std::string> entries(report_.scope.upgraded_entries.begin(), report_.scope.upgraded_entries.end());
    std::vector<bmc::Verdict> verdicts = bmc::check_entries(iu, entries, cfg_.bmc(), check_options("upgraded"));
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      PropertyRecord& r = report_.properties[index[k]];
      switch (verdicts[k].kind) {
        case bmc::Verdict::Kind::Violated: r.property.status = Status::Violated; break;
        case bmc::Verdict::Kind::Valid: r.property.status = Status::Preserved; break;
        case bmc::Verdict::Kind::Unknown:
          r.property.status = verdicts[k].reason == "unmappable" ? Status::Unmappable : Status::Unchecked;
          break;
      }
      r.upgraded_verdict = std::move(verdicts[k]);
    }
    report_.phases_completed = 4;
  });
  write_properties("violated.props", Status::Violated);
  save_state();
}

const Report& Pipeline::run() {
  if (options_.write_files) fs::create_directories(cfg_.output_dir);
  const int start = options_.resume_from;
  if (start > 1) load_state();
  if (start <= 1) phase1_generate();
  if (!report_.no_change) {
    if (start <= 2) phase2_true();
    if (start <= 3) phase3_outdated();
    if (start <= 4) phase4_check();
  }
  report_.timestamp = now_utc();
  if (options_.write_files) {
    if (options_.format != Format::Text) write_file(cfg_.output_dir / "report.json", to_json().dump(2) + "\n");
    if (options_.format != Format::Json) write_file(cfg_.output_dir / "report.txt", to_text());
  }
  return report_;
}

void Pipeline::write_properties(const std::string& name, Status status) const {
  if (!options_.write_files) return;
  std::vector<infer::Property> props;
  for (const auto& r : report_.properties)
    if (status == Status::Dynamic || r.property.status == status) props.push_back(r.property);
  write_file(cfg_.output_dir / name, infer::format_properties(props));
}

Report run_all(const PipelineConfig& cfg, const RunOptions& options) {
  Pipeline p(cfg, options);
  return p.run();
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json point_json(const minic::ProgramPoint& p) {
  Json j;
  j["kind"] = minic::to_string(p.kind);
  if (p.kind == minic::PointKind::Loop) j["ordinal"] = p.ordinal;
  return j;
}

minic::ProgramPoint point_from(const std::string& function, const Json& j) {
  minic::ProgramPoint p;
  p.function = function;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ENTRY") {
    p.kind = minic::PointKind::Entry;
  } else if (kind == "EXIT") {
    p.kind = minic::PointKind::Exit;
  } else if (kind == "LOOP") {
    p.kind = minic::PointKind::Loop;
    p.ordinal = j.at("ordinal").get<int>();
  } else {
    throw Error("state: unknown point kind '" + kind + "'");
  }
  return p;
}

}  // namespace

Json Pipeline::to_json() const {
  const Report& r = report_;
  auto rel = [&](const fs::path& p) {
    if (p.empty()) return std::string();
    fs::path out = p.lexically_normal().lexically_relative(fs::path(cfg_.root).lexically_normal());
    return out.empty() ? p.generic_string() : out.generic_string();
  };
  auto cex_json = [&](const bmc::Counterexample& c, bool upgraded) {
    Json j;
    j["entry"] = c.entry;
    j["inputs"] = bindings_json(c.inputs);
    Json steps = Json::array();
    for (const auto& s : c.steps) {
      Json step;
      step["file"] = display_path(s.at.file, upgraded);
      step["line"] = s.at.line;
      step["function"] = s.function;
      step["statement"] = s.text;
      step["bindings"] = bindings_json(s.bindings);
      if (s.violation) step["violation"] = true;
      steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    return j;
  };
  auto verdict_json = [&](const bmc::Verdict& v, bool upgraded, bool with_cex) {
    Json j;
    j["verdict"] = bmc::to_string(v.kind);
    if (!v.reason.empty()) j["reason"] = v.reason;
    j["entry"] = v.entry;
    j["conflicts"] = v.stats.conflicts;
    if (with_cex && v.counterexample) j["counterexample"] = cex_json(*v.counterexample, upgraded);
    return j;
  };

  Json doc;
  Json meta;
  meta["tool"] = "regsentry";
  meta["format_version"] = 1;
  meta["timestamp"] = r.timestamp;
  meta["phases_completed"] = r.phases_completed;
  meta["no_change"] = r.no_change;
  if (r.no_change) meta["message"] = "no change detected";
  Json cfg;
  cfg["base_dir"] = rel(cfg_.base_dir);
  cfg["upgraded_dir"] = rel(cfg_.upgraded_dir);
  cfg["sources"] = cfg_.sources;
  cfg["tests_base"] = rel(cfg_.tests_base);
  cfg["tests_upgrade"] = rel(cfg_.tests_upgrade);
  cfg["unroll_bound"] = cfg_.unroll_bound;
  cfg["inline_depth"] = cfg_.inline_depth;
  cfg["bit_width"] = cfg_.bit_width;
  cfg["min_support"] = cfg_.min_support;
  cfg["solver_budget"] = cfg_.solver_budget;
  cfg["solver_decision_budget"] = cfg_.solver_decision_budget;
  cfg["solver_timeout_ms"] = cfg_.solver_timeout_ms;
  cfg["unwinding_assertions"] = cfg_.unwinding_assertions;
  cfg["step_budget"] = cfg_.step_budget;
  cfg["parallelism"] = cfg_.parallelism;
  meta["config"] = std::move(cfg);
  meta["scope_policy"] = "changed functions plus direct callers and callees in the base and upgraded call graphs";
  meta["tests"] = {{"base", r.tests_base}, {"upgrade", r.tests_upgrade}};
  doc["metadata"] = std::move(meta);

  doc["change_set"] = {{"modified", names(r.change_set.modified)},
                       {"added", names(r.change_set.added)},
                       {"removed", names(r.change_set.removed)}};
  doc["scope"] = {{"monitored", names(r.scope.monitored)},
                  {"base_entries", names(r.scope.base_entries)},
                  {"upgraded_entries", names(r.scope.upgraded_entries)}};

  Json summary;
  summary["dynamic"] = r.properties.size();
  for (Status s : {Status::True, Status::Discarded, Status::Outdated, Status::NonRegression, Status::Violated,
                   Status::Preserved, Status::Unchecked, Status::Unmappable}) {
    std::string key = infer::to_string(s);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    summary[key] = r.count(s);
  }
  // Properties that reached phase 3 were all TRUE at phase 2.
  summary["true"] = static_cast<std::size_t>(std::count_if(r.properties.begin(), r.properties.end(), [](const auto& p) {
    return p.base_verdict && p.base_verdict->kind == bmc::Verdict::Kind::Valid;
  }));
  doc["summary"] = std::move(summary);

  Json props = Json::array();
  std::map<std::string, std::map<int, std::vector<std::string>>> annotations;
  for (const auto& rec : r.properties) {
    const infer::Property& p = rec.property;
    Json j;
    j["id"] = p.id;
    j["function"] = p.point.function;
    j["point"] = point_json(p.point);
    j["formula"] = infer::to_text(p.formula);
    j["template"] = infer::to_string(p.formula.kind);
    j["status"] = infer::to_string(p.status);
    const bool late = rec.upgraded_verdict.has_value();
    Json bounds;
    bounds["unroll_bound"] = cfg_.unroll_bound;
    bounds["inline_depth"] = cfg_.inline_depth;
    bounds["bit_width"] = cfg_.bit_width;
    bounds["entries"] = names(late ? r.scope.upgraded_entries : r.scope.base_entries);
    j["verdict_bounds"] = std::move(bounds);
    if (rec.base_verdict) j["base_verdict"] = verdict_json(*rec.base_verdict, false, true);
    if (rec.outdated_by) {
      j["outdated_by"] = {{"test", rec.outdated_by->test},
                          {"sequence", rec.outdated_by->sequence},
                          {"bindings", bindings_json(rec.outdated_by->bindings)}};
    }
    if (rec.upgraded_verdict) {
      j["upgraded_verdict"] = verdict_json(*rec.upgraded_verdict, true, false);
      if (rec.upgraded_verdict->counterexample)
        j["counterexample"] = cex_json(*rec.upgraded_verdict->counterexample, true);
    }
    props.push_back(std::move(j));

    const bool upgraded_side = p.status != Status::Dynamic && p.status != Status::True &&
                               p.status != Status::Discarded && versions_.upgraded.point(p.point);
    const auto& unit = upgraded_side ? versions_.upgraded : versions_.base;
    for (const auto& at : anchor_lines(unit, p.point)) {
      auto& ids = annotations[display_path(at.file, upgraded_side)][at.line];
      if (std::find(ids.begin(), ids.end(), p.id) == ids.end()) ids.push_back(p.id);
    }
  }
  doc["properties"] = std::move(props);
  Json ann = Json::object();
  for (const auto& [file, lines] : annotations) {
    Json per = Json::object();
    for (const auto& [line, ids] : lines) per[std::to_string(line)] = ids;
    ann[file] = std::move(per);
  }
  doc["annotations"] = std::move(ann);
  doc["exit_status"] = r.exit_status();
  return doc;
}

void Pipeline::save_state() const {
  if (!options_.write_files) return;
  write_file(cfg_.output_dir / "state.json", to_json().dump(2) + "\n");
}

void Pipeline::load_state() {
  const fs::path path = cfg_.output_dir / "state.json";
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot resume: '" + path.string() + "' not found");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot resume: malformed state: " + std::string(e.what()));
  }
  auto file_index = [&](const std::string& display, bool upgraded) {
    const auto& files = (upgraded ? versions_.upgraded : versions_.base).unit().files;
    for (std::size_t i = 0; i < files.size(); ++i)
      if (display_path(static_cast<int>(i), upgraded) == display) return static_cast<int>(i);
    return 0;
  };
  auto cex_from = [&](const Json& j, bool upgraded) {
    bmc::Counterexample c;
    c.entry = j.at("entry").get<std::string>();
    c.inputs = bindings_from(j.at("inputs"));
    for (const auto& s : j.at("steps")) {
      bmc::CounterexampleStep step;
      step.at = bmc::OriginalLine{file_index(s.at("file").get<std::string>(), upgraded), s.at("line").get<int>()};
      step.function = s.at("function").get<std::string>();
      step.text = s.at("statement").get<std::string>();
      step.bindings = bindings_from(s.at("bindings"));
      step.violation = s.value("violation", false);
      c.steps.push_back(std::move(step));
    }
    return c;
  };
  auto verdict_from = [&](const Json& j, bool upgraded) {
    bmc::Verdict v;
    const std::string kind = j.at("verdict").get<std::string>();
    v.kind = kind == "VALID" ? bmc::Verdict::Kind::Valid
             : kind == "VIOLATED" ? bmc::Verdict::Kind::Violated
                                  : bmc::Verdict::Kind::Unknown;
    v.reason = j.value("reason", "");
    v.entry = j.at("entry").get<std::string>();
    v.stats.conflicts = j.value("conflicts", std::int64_t{0});
    if (j.contains("counterexample")) v.counterexample = cex_from(j.at("counterexample"), upgraded);
    return v;
  };

  try {
    Report r;
    const Json& meta = doc.at("metadata");
    r.phases_completed = meta.at("phases_completed").get<int>();
    r.no_change = meta.at("no_change").get<bool>();
    for (const auto& t : meta.at("tests").at("base")) r.tests_base.push_back(t.get<std::string>());
    for (const auto& t : meta.at("tests").at("upgrade")) r.tests_upgrade.push_back(t.get<std::string>());
    r.change_set.modified = name_set(doc.at("change_set").at("modified"));
    r.change_set.added = name_set(doc.at("change_set").at("added"));
    r.change_set.removed = name_set(doc.at("change_set").at("removed"));
    r.scope.monitored = name_set(doc.at("scope").at("monitored"));
    r.scope.base_entries = name_set(doc.at("scope").at("base_entries"));
    r.scope.upgraded_entries = name_set(doc.at("scope").at("upgraded_entries"));
    for (const auto& j : doc.at("properties")) {
      PropertyRecord rec;
      const std::string function = j.at("function").get<std::string>();
      rec.property = infer::make_property(point_from(function, j.at("point")),
                                          infer::parse_formula(j.at("formula").get<std::string>(), cfg_.bit_width));
      auto status = infer::parse_status(j.at("status").get<std::string>());
      if (!status) throw Error("unknown status");
      rec.property.status = *status;
      if (j.contains("base_verdict")) rec.base_verdict = verdict_from(j.at("base_verdict"), false);
      if (j.contains("outdated_by")) {
        const Json& o = j.at("outdated_by");
        rec.outdated_by = OutdatedEvidence{o.at("test").get<std::string>(), o.at("sequence").get<std::uint64_t>(),
                                           bindings_from(o.at("bindings"))};
      }
      if (j.contains("upgraded_verdict")) {
        rec.upgraded_verdict = verdict_from(j.at("upgraded_verdict"), true);
        if (j.contains("counterexample")) rec.upgraded_verdict->counterexample = cex_from(j.at("counterexample"), true);
      }
      r.properties.push_back(std::move(rec));
    }
    if (r.phases_completed < options_.resume_from - 1)
      throw ConfigError("cannot resume from phase " + std::to_string(options_.resume_from) + ": state holds " +
                        std::to_string(r.phases_completed) + " completed phase(s)");
    // Roll statuses back to what they were after phase resume_from - 1.
    const int keep = options_.resume_from - 1;
    if (!r.no_change) {
      r.phases_completed = std::min(r.phases_completed, keep);
      for (auto& rec : r.properties) {
        if (keep < 4) rec.upgraded_verdict.reset();
        if (keep < 3) rec.outdated_by.reset();
        if (keep < 2) rec.base_verdict.reset();
        if (keep == 1) {
          rec.property.status = Status::Dynamic;
        } else if (keep == 2) {
          rec.property.status = rec.base_verdict && rec.base_verdict->kind == bmc::Verdict::Kind::Valid
                                    ? Status::True
                                    : Status::Discarded;
        } else if (keep == 3 && rec.property.status != Status::Outdated && rec.property.status != Status::Discarded) {
          const bool mapped = bmc::mappable(rec.property, versions_.upgraded);
          if (rec.property.status != Status::Unmappable || mapped)
            rec.property.status = Status::NonRegression;
        }
      }
    }
    report_ = std::move(r);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot resume: malformed state: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// Text

std::string Pipeline::to_text() const {
  const Report& r = report_;
  std::ostringstream out;
  auto list = [](const std::set<std::string>& s) {
    if (s.empty()) return std::string("-");
    std::string o;
    for (const auto& x : s) o += (o.empty() ? "" : ", ") + x;
    return o;
  };
  auto values = [](const std::vector<std::pair<std::string, minic::Value>>& b) {
    std::string o;
    for (const auto& [k, v] : b) o += (o.empty() ? "" : ", ") + infer::name_to_text(k) + " = " + std::to_string(v);
    return o;
  };
  auto describe = [](const infer::Property& p) {
    return minic::to_string(p.point) + "  " + infer::to_text(p.formula);
  };

  out << "regsentry regression report\n";
  out << "generated " << r.timestamp << "\n\n";
  if (r.no_change) {
    out << "no change detected; nothing to check\n";
    return out.str();
  }
  out << "change set\n";
  out << "  modified: " << list(r.change_set.modified) << "\n";
  out << "  added:    " << list(r.change_set.added) << "\n";
  out << "  removed:  " << list(r.change_set.removed) << "\n";
  out << "scope\n";
  out << "  monitored:        " << list(r.scope.monitored) << "\n";
  out << "  base entries:     " << list(r.scope.base_entries) << "\n";
  out << "  upgraded entries: " << list(r.scope.upgraded_entries) << "\n";
  out << "bounds: unroll " << cfg_.unroll_bound << ", inline depth " << cfg_.inline_depth << ", width "
      << cfg_.bit_width << " (VALID means true within these bounds)\n\n";

  out << "summary\n";
  out << "  dynamic         " << r.properties.size() << "\n";
  for (Status s : {Status::Discarded, Status::Outdated, Status::Unmappable, Status::Violated, Status::Preserved,
                   Status::Unchecked}) {
    std::string name = infer::to_string(s);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    out << "  " << name << std::string(16 - name.size(), ' ') << r.count(s) << "\n";
  }
  if (r.phases_completed < 4) out << "  (stopped after phase " << r.phases_completed << ")\n";
  out << "\n";

  auto section = [&](const char* title, Status status, const std::function<void(const PropertyRecord&)>& body) {
    if (r.count(status) == 0) return;
    out << title << "\n";
    for (const auto& rec : r.properties)
      if (rec.property.status == status) body(rec);
    out << "\n";
  };

  section("violations", Status::Violated, [&](const PropertyRecord& rec) {
    out << "  [VIOLATED] " << describe(rec.property) << "  (" << rec.property.id << ")\n";
    if (!rec.upgraded_verdict || !rec.upgraded_verdict->counterexample) return;
    const auto& c = *rec.upgraded_verdict->counterexample;
    out << "    entry " << c.entry << " with " << values(c.inputs) << "\n";
    for (const auto& s : c.steps) {
      out << "    " << (s.violation ? ">> " : "   ") << display_path(s.at.file, true) << ":" << s.at.line << "  "
          << s.text;
      if (!s.bindings.empty()) out << "    [" << values(s.bindings) << "]";
      out << "\n";
    }
  });
  section("unchecked (not proved within budget or bounds)", Status::Unchecked, [&](const PropertyRecord& rec) {
    out << "  [UNCHECKED] " << describe(rec.property);
    if (rec.upgraded_verdict) out << "  (" << rec.upgraded_verdict->reason << ")";
    out << "\n";
  });
  section("outdated", Status::Outdated, [&](const PropertyRecord& rec) {
    out << "  [OUTDATED] " << describe(rec.property);
    if (rec.outdated_by)
      out << "  falsified by test " << rec.outdated_by->test << " #" << rec.outdated_by->sequence << " ("
          << values(rec.outdated_by->bindings) << ")";
    out << "\n";
  });
  section("unmappable", Status::Unmappable,
          [&](const PropertyRecord& rec) { out << "  [UNMAPPABLE] " << describe(rec.property) << "\n"; });

  // Annotated upgraded sources: every line with anchored properties.
  std::map<std::pair<int, int>, std::vector<const PropertyRecord*>> by_line;
  for (const auto& rec : r.properties) {
    const Status s = rec.property.status;
    if (s == Status::Discarded || s == Status::Dynamic || s == Status::True || !versions_.upgraded.point(rec.property.point))
      continue;
    for (const auto& at : anchor_lines(versions_.upgraded, rec.property.point)) by_line[{at.file, at.line}].push_back(&rec);
  }
  int current_file = -1;
  for (const auto& [where, recs] : by_line) {
    if (where.first != current_file) {
      current_file = where.first;
      out << "annotated source: " << display_path(current_file, true) << "\n";
    }
    std::size_t preserved = 0;
    for (const PropertyRecord* rec : recs) {
      if (rec->property.status == Status::Preserved) {
        ++preserved;
        continue;
      }
      out << "        // [" << infer::to_string(rec->property.status) << "] " << describe(rec->property) << "\n";
    }
    if (preserved) out << "        // " << preserved << " preserved\n";
    char num[16];
    std::snprintf(num, sizeof num, "%6d", where.second);
    out << num << " | " << versions_.upgraded.source_line(where.first, where.second) << "\n";
  }
  out << "\nexit status " << r.exit_status() << "\n";
  return out.str();
}

}  // namespace regsentry::pipeline
