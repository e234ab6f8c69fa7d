#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "regsentry/error.hpp"
#include "regsentry/pipeline/pipeline.hpp"
#include "support.hpp"

using namespace regsentry;
using namespace regsentry::pipeline;
using infer::Status;
namespace fs = std::filesystem;

namespace {

PipelineConfig example(const std::string& name, const std::string& out) {
  PipelineConfig cfg = load_config(testing::data_dir() / name / (name + ".conf"));
  cfg.output_dir = testing::scratch_dir(out);
  return cfg;
}

const PropertyRecord* find(const Report& r, const std::string& function, minic::PointKind kind,
                           const std::string& formula) {
  for (const auto& rec : r.properties)
    if (rec.property.point.function == function && rec.property.point.kind == kind &&
        infer::to_text(rec.property.formula) == formula)
      return &rec;
  return nullptr;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REGSENTRY_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string strip_timestamp(Json j) {
  j["metadata"].erase("timestamp");
  return j.dump(2);
}

}  // namespace

TEST_CASE("config parsing") {
  const fs::path root = "/tmp/cfgroot";
  PipelineConfig cfg = parse_config(R"(# comment
base_dir = v1
upgraded_dir = /abs/v2   # trailing comment
tests_base = t/base.manifest
unroll_bound = 3
bit_width = 8
solver_budget = 50
unwinding_assertions = true
)",
                                    root);
  CHECK(cfg.base_dir == root / "v1");
  CHECK(cfg.upgraded_dir == fs::path("/abs/v2"));
  CHECK(cfg.tests_base == root / "t/base.manifest");
  CHECK(cfg.tests_upgrade.empty());
  CHECK(cfg.unroll_bound == 3);
  CHECK(cfg.bit_width == 8);
  CHECK(cfg.unwinding_assertions);
  CHECK(cfg.bmc().budget.max_conflicts == 50);
  CHECK(cfg.sources == "*.mc");

  const std::string req = "base_dir = a\nupgraded_dir = b\ntests_base = c\n";
  CHECK_THROWS_AS(parse_config("base_dir = a\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "colour = blue\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "base_dir = again\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "unroll_bound = five\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "unroll_bound = 0\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "bit_width = 40\n", root), ConfigError);
  CHECK_THROWS_AS(parse_config(req + "no equals sign\n", root), ConfigError);
}

TEST_CASE("sources are listed by glob in sorted order") {
  auto dir = testing::scratch_dir("glob");
  for (const char* f : {"b.mc", "a.mc", "c.txt", "sub.mc.bak"}) testing::write_file(dir / f, "");
  auto files = list_sources(dir, "*.mc");
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "a.mc");
  CHECK(files[1].filename() == "b.mc");
}

TEST_CASE("store example end to end") {
  Pipeline p(example("store", "pipeline_store"));
  const Report& r = p.run();
  CHECK(r.phases_completed == 4);
  CHECK(r.exit_status() == 1);

  const auto* one_of = find(r, "is_available", minic::PointKind::Exit, "return == 0 || return == 1");
  REQUIRE(one_of);
  CHECK(one_of->property.status == Status::Outdated);
  REQUIRE(one_of->outdated_by);
  CHECK(one_of->outdated_by->test == "out_of_catalog");

  const auto* total = find(r, "available_products", minic::PointKind::Loop, "total >= 0");
  REQUIRE(total);
  CHECK(total->property.status == Status::Violated);
  CHECK(total->base_verdict->kind == bmc::Verdict::Kind::Valid);
  REQUIRE(total->upgraded_verdict->counterexample);

  // Lifecycle partition.
  for (const auto& rec : r.properties) {
    const Status s = rec.property.status;
    CHECK(s != Status::Dynamic);
    CHECK(s != Status::True);
    CHECK(s != Status::NonRegression);
    if (s == Status::Discarded) CHECK(rec.base_verdict->kind != bmc::Verdict::Kind::Valid);
    if (s == Status::Violated || s == Status::Preserved || s == Status::Unchecked) {
      CHECK(rec.base_verdict->kind == bmc::Verdict::Kind::Valid);
      CHECK_FALSE(rec.outdated_by);
      CHECK(rec.upgraded_verdict);
    }
    if (s == Status::Violated) CHECK(rec.upgraded_verdict->counterexample);
  }
  // Phase artifacts.
  for (const char* f : {"base.trace", "upgraded.trace", "dynamic.props", "true.props", "discarded.props",
                        "outdated.props", "non_regression.props", "violated.props", "state.json", "report.json",
                        "report.txt"})
    CHECK_MESSAGE(fs::exists(p.config().output_dir / f), f);
}

TEST_CASE("JSON report shape") {
  Pipeline p(example("store", "pipeline_json"));
  p.run();
  Json j = p.to_json();
  for (const char* key : {"metadata", "change_set", "scope", "summary", "properties", "annotations", "exit_status"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["exit_status"] == 1);
  CHECK(j["change_set"]["modified"] == Json::array({"is_available"}));
  CHECK(j["metadata"]["config"]["base_dir"] == "base");
  CHECK(j["summary"]["violated"].get<int>() >= 1);
  bool saw = false;
  for (const auto& prop : j["properties"]) {
    for (const char* key : {"id", "function", "point", "formula", "status", "verdict_bounds"}) CHECK(prop.contains(key));
    if (prop["status"] != "VIOLATED") {
      CHECK_FALSE(prop.contains("counterexample"));
      continue;
    }
    saw = true;
    const auto& cex = prop["counterexample"];
    CHECK(cex.contains("inputs"));
    CHECK(cex["steps"].back()["violation"] == true);
    for (const auto& step : cex["steps"]) CHECK(step["file"] == "upgraded/store.mc");
  }
  CHECK(saw);
  const std::string text = p.to_text();
  CHECK(text.find("violations") != std::string::npos);
  CHECK(text.find("[OUTDATED] is_available EXIT  return == 0 || return == 1") != std::string::npos);
  CHECK(text.find("|   return total;") != std::string::npos);
}

TEST_CASE("reports are identical apart from the timestamp") {
  Pipeline a(example("store", "pipeline_det_a"));
  a.run();
  Pipeline b(example("store", "pipeline_det_b"));
  b.run();
  CHECK(strip_timestamp(a.to_json()) == strip_timestamp(b.to_json()));
}

TEST_CASE("resuming from each phase reproduces the report") {
  PipelineConfig cfg = example("store", "pipeline_resume");
  Pipeline full(cfg);
  full.run();
  const std::string reference = strip_timestamp(full.to_json());
  for (int k = 2; k <= 4; ++k) {
    RunOptions o;
    o.resume_from = k;
    Pipeline p(cfg, o);
    p.run();
    CHECK_MESSAGE(strip_timestamp(p.to_json()) == reference, "resume from " << k);
  }
}

TEST_CASE("resume without state is a configuration error") {
  RunOptions o;
  o.resume_from = 3;
  Pipeline p(example("store", "pipeline_nostate"), o);
  CHECK_THROWS_AS(p.run(), ConfigError);
}

TEST_CASE("identical versions report no change") {
  PipelineConfig cfg = example("store", "pipeline_same");
  cfg.upgraded_dir = cfg.base_dir;
  Pipeline p(cfg);
  const Report& r = p.run();
  CHECK(r.no_change);
  CHECK(r.properties.empty());
  CHECK(r.exit_status() == 0);
  CHECK(p.to_json()["metadata"]["message"] == "no change detected");
  CHECK(p.to_text().find("no change detected") != std::string::npos);
}

TEST_CASE("without an upgrade suite every true property is checked") {
  PipelineConfig cfg = example("store", "pipeline_noupgrade");
  cfg.tests_upgrade.clear();
  Pipeline p(cfg);
  p.phase1_generate();
  p.phase2_true();
  const std::size_t truths = p.report().count(Status::True);
  p.phase3_outdated();
  CHECK(p.report().count(Status::Outdated) == 0);
  CHECK(p.report().count(Status::NonRegression) == truths);
  p.phase4_check();
  // With the upgrade unexercised, one-of {0,1} now surfaces as a violation.
  const auto* one_of = find(p.report(), "is_available", minic::PointKind::Exit, "return == 0 || return == 1");
  REQUIRE(one_of);
  CHECK(one_of->property.status == Status::Violated);
}

TEST_CASE("budget exhaustion discards instead of reporting") {
  PipelineConfig cfg = example("store", "pipeline_budget");
  cfg.solver_budget = 1;
  cfg.solver_decision_budget = 1;
  Pipeline p(cfg);
  p.phase1_generate();
  p.phase2_true();
  std::size_t unknown = 0;
  for (const auto& rec : p.report().properties)
    if (rec.base_verdict->kind == bmc::Verdict::Kind::Unknown) {
      ++unknown;
      CHECK(rec.property.status == Status::Discarded);
      CHECK(rec.base_verdict->reason == "budget");
    }
  CHECK(unknown > 0);
  p.phase3_outdated();
  p.phase4_check();
  for (const auto& rec : p.report().properties)
    if (rec.base_verdict->kind == bmc::Verdict::Kind::Unknown) CHECK(rec.property.status == Status::Discarded);
}

TEST_CASE("overfit upper bound is discarded in phase 2") {
  Pipeline p(example("overfit", "pipeline_overfit"));
  p.phase1_generate();
  const auto* bound = find(p.report(), "price", minic::PointKind::Exit, "return <= 25");
  REQUIRE(bound);
  CHECK(bound->property.status == Status::Dynamic);
  p.phase2_true();
  CHECK(bound->property.status == Status::Discarded);
  CHECK(bound->base_verdict->kind == bmc::Verdict::Kind::Violated);
}

TEST_CASE("configuration and analysis errors") {
  PipelineConfig cfg = example("store", "pipeline_errors");
  cfg.tests_base = cfg.root / "tests" / "nope.manifest";
  CHECK_THROWS_AS(Pipeline{cfg}, ConfigError);

  // A faulting upgrade test aborts phase 3.
  auto dir = testing::scratch_dir("pipeline_fault_suite");
  testing::write_file(dir / "bad.mc", "void test_bad() { int a[4] = {1, 2, 3, 4}; int i = 7; t_product p = {a[i], 1}; }");
  testing::write_file(dir / "up.manifest", "bad.mc\n");
  PipelineConfig faulty = example("store", "pipeline_fault");
  faulty.tests_upgrade = dir / "up.manifest";
  Pipeline p(faulty);
  try {
    p.run();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("phase 3", 0) == 0);
  }
}

TEST_CASE("command line exit codes") {
  auto out = testing::scratch_dir("cli_store");
  // A copy of the store config pointing its output into the build tree.
  std::string conf = testing::read_file(testing::data_dir() / "store" / "store.conf");
  conf.replace(conf.find("output_dir = out"), 16, "output_dir = " + out.string());
  const fs::path conf_path = testing::data_dir() / "store" / ".cli_test.conf";
  testing::write_file(conf_path, conf);
  CHECK(run_cli("run --config " + conf_path.string()) == 1);
  CHECK(run_cli("run --config " + conf_path.string() + " --format json --resume-from 4") == 1);
  CHECK(fs::exists(out / "report.json"));
  CHECK(run_cli("run --config " + conf_path.string() + " --emit-cnf -q") == 1);
  CHECK(!fs::is_empty(out / "cnf"));
  fs::remove(conf_path);

  CHECK(run_cli("run --config /nonexistent.conf") == 2);
  CHECK(run_cli("run --config " + (testing::data_dir() / "store" / "store.conf").string() + " --resume-from 9") == 2);
  CHECK(run_cli("frobnicate") == 2);
}
