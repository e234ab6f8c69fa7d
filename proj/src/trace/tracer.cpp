#include "regsentry/trace/tracer.hpp"

#include <filesystem>
#include <fstream>

#include "regsentry/error.hpp"
#include "regsentry/minic/parser.hpp"
#include "regsentry/util/parallel.hpp"

namespace regsentry::trace {

namespace {

TestCase validate(minic::SourceUnit harness, Suite suite, const std::string& path) {
  if (harness.functions.size() != 1)
    throw SemanticError(SemanticError::Kind::Misplaced,
                        path + ": a harness must define exactly one function");
  const minic::FunctionDef& f = harness.functions.front();
  if (f.name.rfind("test_", 0) != 0 || f.name.size() <= 5)
    throw SemanticError(SemanticError::Kind::Misplaced,
                        path + ": harness function must be named test_<name>");
  if (!f.params.empty())
    throw SemanticError(SemanticError::Kind::Misplaced,
                        path + ": harness function '" + f.name + "' must take no parameters");
  if (!harness.records.empty())
    throw SemanticError(SemanticError::Kind::Misplaced, path + ": harnesses may not declare records");
  TestCase t;
  t.name = f.name.substr(5);
  t.harness_path = path;
  t.suite = suite;
  t.harness = std::move(harness);
  return t;
}

}  // namespace

TestCase load_test(const std::string& path, Suite suite) {
  return validate(minic::parse_file(path), suite, path);
}

TestCase make_test(const std::string& source, Suite suite, const std::string& path) {
  minic::ParseOptions opts;
  opts.path = path;
  return validate(minic::parse(source, opts), suite, path);
}

std::vector<TestCase> load_manifest(const std::string& path, Suite suite) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read test manifest '" + path + "'");
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::vector<TestCase> out;
  std::string line;
  while (std::getline(in, line)) {
    auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    auto end = line.find_last_not_of(" \t\r");
    std::filesystem::path p = line.substr(start, end - start + 1);
    if (p.is_relative()) p = dir / p;
    if (!std::filesystem::exists(p))
      throw ConfigError("manifest '" + path + "' references missing harness '" + p.string() + "'");
    out.push_back(load_test(p.string(), suite));
  }
  return out;
}

TraceLog run_test(const minic::SourceUnit& version, const TestCase& test,
                  const std::set<std::string>& monitored, Version which,
                  const TraceConfig& config) {
  minic::AnalyzedUnit unit =
      minic::analyze(minic::merge({minic::clone(version), minic::clone(test.harness)}));
  TraceLog log;
  log.version = which;
  log.width = config.width;
  log.tests_run.push_back(test.name);
  std::uint64_t sequence = 0;
  Interpreter interp(unit, InterpreterConfig{config.width, config.step_budget});
  interp.observe(
      [&](const minic::PointInfo& info, const std::vector<Value>& values) {
        TraceSample s;
        s.point = log.intern(info);
        s.test = test.name;
        s.sequence = sequence++;
        s.values = values;
        log.samples.push_back(std::move(s));
        return true;
      },
      [&](const std::string& f) { return monitored.count(f) != 0; });
  interp.call(test.harness.functions.front().name, {});
  return log;
}

TraceLog run_suite(const minic::SourceUnit& version, const std::vector<TestCase>& tests,
                   const std::set<std::string>& monitored, Version which,
                   const TraceConfig& config, int parallelism) {
  std::vector<TraceLog> logs(tests.size());
  util::parallel_for(tests.size(), parallelism, [&](std::size_t i) {
    logs[i] = run_test(version, tests[i], monitored, which, config);
  });
  TraceLog out;
  out.version = which;
  out.width = config.width;
  for (const auto& l : logs) append(out, l);
  return out;
}

}  // namespace regsentry::trace
