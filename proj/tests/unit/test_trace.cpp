#include <doctest.h>

#include "regsentry/error.hpp"
#include "regsentry/pipeline/pipeline.hpp"
#include "regsentry/trace/tracer.hpp"
#include "support.hpp"

using namespace regsentry;
using namespace regsentry::trace;

namespace {

minic::AnalyzedUnit store_base() {
  return pipeline::load_versions(pipeline::load_config(testing::data_dir() / "store" / "store.conf")).base;
}

const std::set<std::string> kMonitored{"available_products", "is_available"};

TraceLog store_log() {
  auto unit = store_base();
  auto tests = load_manifest((testing::data_dir() / "store" / "tests" / "base.manifest").string(), Suite::Base);
  return run_suite(unit.unit(), tests, kMonitored, Version::Base, {}, 2);
}

}  // namespace

TEST_CASE("two in-stock and one out-of-stock product") {
  auto unit = store_base();
  TestCase t = make_test(R"(void test_mixed() {
  int items[4] = {3, 0, 9, 0};
  int in_catalog[4] = {1, 1, 1, 1};
  available_products(items, in_catalog, 3);
})",
                         Suite::Base);
  CHECK(t.name == "mixed");
  TraceLog log = run_test(unit.unit(), t, kMonitored, Version::Base);

  const int exit = log.find_point(minic::ProgramPoint::exit("available_products"));
  const int ia_entry = log.find_point(minic::ProgramPoint::entry("is_available"));
  const int ia_exit = log.find_point(minic::ProgramPoint::exit("is_available"));
  const int loop = log.find_point(minic::ProgramPoint::loop("available_products", 0));
  REQUIRE(exit >= 0);
  REQUIRE(ia_entry >= 0);
  REQUIRE(ia_exit >= 0);

  std::vector<Value> ia_returns;
  int exits = 0, entries = 0, loops = 0;
  for (const auto& s : log.samples) {
    SampleView view(log.points[static_cast<std::size_t>(s.point)], s);
    if (s.point == exit) {
      ++exits;
      CHECK(view.get("total") == 2);
      CHECK(view.get("return") == 2);
      CHECK(view.get("i") == 3);
    }
    if (s.point == ia_entry) ++entries;
    if (s.point == ia_exit) ia_returns.push_back(*view.get("return"));
    if (s.point == loop) ++loops;
  }
  CHECK(exits == 1);
  CHECK(entries == 3);
  CHECK(ia_returns == std::vector<Value>{1, 0, 1});
  CHECK(loops == 4);  // three iterations plus the final condition check
  // Sequence numbers order the samples of one test.
  for (std::size_t i = 1; i < log.samples.size(); ++i) CHECK(log.samples[i].sequence > log.samples[i - 1].sequence);
}

TEST_CASE("loop samples are taken before each condition") {
  auto unit = store_base();
  TestCase t = make_test(R"(void test_two() {
  int items[4] = {1, 1, 1, 1};
  int in_catalog[4] = {1, 1, 1, 1};
  available_products(items, in_catalog, 2);
})",
                         Suite::Base);
  TraceLog log = run_test(unit.unit(), t, kMonitored, Version::Base);
  const int loop = log.find_point(minic::ProgramPoint::loop("available_products", 0));
  std::vector<Value> totals;
  for (const auto& s : log.samples)
    if (s.point == loop) totals.push_back(*SampleView(log.points[static_cast<std::size_t>(loop)], s).get("total"));
  CHECK(totals == std::vector<Value>{0, 1, 2});
}

TEST_CASE("harness calling only unmonitored code yields no samples") {
  auto unit = testing::analyze_text("int helper(int x) { return x; } int other(int y) { return helper(y); }");
  TestCase t = make_test("void test_h() { helper(3); }", Suite::Base);
  TraceLog log = run_test(unit.unit(), t, {"other"}, Version::Base);
  CHECK(log.samples.empty());
}

TEST_CASE("out-of-bounds access in a harness is a runtime fault") {
  auto unit = store_base();
  TestCase t = make_test("void test_oob() { int arr[4] = {1, 2, 3, 4}; int x = arr[4]; }", Suite::Base);
  CHECK_THROWS_AS(run_test(unit.unit(), t, kMonitored, Version::Base), RuntimeFault);
}

TEST_CASE("harness rules") {
  CHECK_THROWS_AS(make_test("void helper() { }", Suite::Base), Error);
  CHECK_THROWS_AS(make_test("void test_a() { } void test_b() { }", Suite::Base), Error);
  CHECK_THROWS_AS(make_test("void test_a(int x) { }", Suite::Base), Error);
  CHECK_THROWS(make_test("void test_a() { assume(1); }", Suite::Base));
}

TEST_CASE("manifest with a missing harness is a configuration error") {
  auto dir = testing::scratch_dir("manifest_missing");
  testing::write_file(dir / "m.manifest", "# suite\n\nmissing.mc\n");
  CHECK_THROWS_AS(load_manifest((dir / "m.manifest").string(), Suite::Base), ConfigError);
}

TEST_CASE("trace text format round trips") {
  TraceLog empty;
  CHECK(parse_trace(format_trace(empty)) == empty);

  TraceLog log = store_log();
  CHECK(log.tests_run.size() == 3);
  CHECK(!log.samples.empty());
  TraceLog back = parse_trace(format_trace(log));
  CHECK(back == log);
  CHECK(format_trace(back) == format_trace(log));

  auto dir = testing::scratch_dir("trace_roundtrip");
  write_trace(log, (dir / "base.trace").string());
  CHECK(read_trace((dir / "base.trace").string()) == log);
}

TEST_CASE("parallel tracing merges in test order") {
  auto unit = store_base();
  auto tests = load_manifest((testing::data_dir() / "store" / "tests" / "base.manifest").string(), Suite::Base);
  TraceLog serial = run_suite(unit.unit(), tests, kMonitored, Version::Base, {}, 1);
  TraceLog parallel = run_suite(unit.unit(), tests, kMonitored, Version::Base, {}, 4);
  CHECK(serial == parallel);
}

TEST_CASE("malformed trace files") {
  const std::string header = "trace 1\nversion BASE\nwidth 16\ntest t\npoint f ENTRY x y\n";
  CHECK_NOTHROW(parse_trace(header + "s 0 t 1 4 5\n"));
  CHECK_THROWS_AS(parse_trace(header + "s 0 t 1 4\n"), TraceFormatError);
  CHECK_THROWS_AS(parse_trace(header + "s 1 t 1 4 5\n"), TraceFormatError);
  CHECK_THROWS_AS(parse_trace(header + "s 0 t 1 4 five\n"), TraceFormatError);
  CHECK_THROWS_AS(parse_trace("trace 2\n"), TraceFormatError);
  CHECK_THROWS_AS(parse_trace(header + "bogus\n"), TraceFormatError);
}

TEST_CASE("void fall-through exit sees top-level locals") {
  auto unit = testing::analyze_text("void note(int a) { int d = a - 1; if (d > 0) { return; } } "
                                    "int run(int a) { note(a); return a; }");
  TestCase t = make_test("void test_n() { run(0); run(5); }", Suite::Base);
  TraceLog log = run_test(unit.unit(), t, {"note"}, Version::Base);
  const int exit = log.find_point(minic::ProgramPoint::exit("note"));
  REQUIRE(exit >= 0);
  std::vector<Value> ds;
  for (const auto& s : log.samples)
    if (s.point == exit) ds.push_back(*SampleView(log.points[static_cast<std::size_t>(exit)], s).get("d"));
  CHECK(ds == std::vector<Value>{-1, 4});
}

TEST_CASE("step budget applies per top-level call") {
  auto unit = testing::analyze_text("int f(int x) { int i = 0; while (i < 3) { i = i + 1; } return i; }");
  Interpreter interp(unit, InterpreterConfig{16, 40});
  for (int k = 0; k < 20; ++k) CHECK(interp.call("f", {{k}}).result.at(0) == 3);
  Interpreter tight(unit, InterpreterConfig{16, 3});
  CHECK_THROWS_AS(tight.call("f", {{0}}), RuntimeFault);
}
