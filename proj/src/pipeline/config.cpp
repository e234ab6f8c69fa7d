#include "regsentry/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fnmatch.h>

#include "regsentry/error.hpp"

namespace regsentry::pipeline {

namespace fs = std::filesystem;

bmc::BmcConfig PipelineConfig::bmc() const {
  bmc::BmcConfig c;
  c.unroll_bound = unroll_bound;
  c.inline_depth = inline_depth;
  c.bit_width = bit_width;
  c.budget.max_conflicts = solver_budget;
  c.budget.max_decisions = solver_decision_budget;
  c.budget.timeout = std::chrono::milliseconds(solver_timeout_ms);
  c.unwinding_assertions = unwinding_assertions;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value, int line) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" +
                      value + "'");
  return out;
}

bool boolean(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects true or false");
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const fs::path& root) {
  PipelineConfig cfg;
  cfg.root = root;
  auto path = [&](const std::string& v) {
    fs::path p = v;
    return p.is_relative() ? root / p : p;
  };
  using Setter = std::function<void(const std::string&, int)>;
  std::string current;
  std::map<std::string, Setter> setters{
      {"base_dir", [&](const std::string& v, int) { cfg.base_dir = path(v); }},
      {"upgraded_dir", [&](const std::string& v, int) { cfg.upgraded_dir = path(v); }},
      {"sources", [&](const std::string& v, int) { cfg.sources = v; }},
      {"tests_base", [&](const std::string& v, int) { cfg.tests_base = path(v); }},
      {"tests_upgrade", [&](const std::string& v, int) { cfg.tests_upgrade = v.empty() ? fs::path() : path(v); }},
      {"unroll_bound", [&](const std::string& v, int l) { cfg.unroll_bound = number<int>(current, v, l); }},
      {"inline_depth", [&](const std::string& v, int l) { cfg.inline_depth = number<int>(current, v, l); }},
      {"bit_width", [&](const std::string& v, int l) { cfg.bit_width = number<int>(current, v, l); }},
      {"min_support", [&](const std::string& v, int l) { cfg.min_support = number<int>(current, v, l); }},
      {"solver_budget", [&](const std::string& v, int l) { cfg.solver_budget = number<std::int64_t>(current, v, l); }},
      {"solver_decision_budget",
       [&](const std::string& v, int l) { cfg.solver_decision_budget = number<std::int64_t>(current, v, l); }},
      {"solver_timeout_ms",
       [&](const std::string& v, int l) { cfg.solver_timeout_ms = number<std::int64_t>(current, v, l); }},
      {"unwinding_assertions", [&](const std::string& v, int l) { cfg.unwinding_assertions = boolean(current, v, l); }},
      {"step_budget", [&](const std::string& v, int l) { cfg.step_budget = number<std::uint64_t>(current, v, l); }},
      {"parallelism", [&](const std::string& v, int l) { cfg.parallelism = number<int>(current, v, l); }},
      {"output_dir", [&](const std::string& v, int) { cfg.output_dir = path(v); }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string content = trim(raw);
    if (content.empty()) continue;
    auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string k = trim(content.substr(0, eq));
    const std::string v = trim(content.substr(eq + 1));
    auto it = setters.find(k);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + k + "'");
    if (!seen.insert(k).second) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + k + "'");
    current = k;
    it->second(v, line);
  }
  for (const char* required : {"base_dir", "upgraded_dir", "tests_base"})
    if (!seen.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  if (cfg.min_support < 1) throw ConfigError("min_support must be at least 1");
  if (cfg.solver_budget < 1) throw ConfigError("solver_budget must be positive");
  if (cfg.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (cfg.step_budget < 1) throw ConfigError("step_budget must be positive");
  bmc::validate(cfg.bmc());
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  fs::path root = path.parent_path();
  if (root.empty()) root = ".";
  return parse_config(buf.str(), root);
}

std::vector<fs::path> list_sources(const fs::path& dir, const std::string& pattern) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate(const PipelineConfig& cfg) {
  for (const auto& [what, dir] : {std::pair{"base_dir", cfg.base_dir}, std::pair{"upgraded_dir", cfg.upgraded_dir}}) {
    if (!fs::is_directory(dir)) throw ConfigError(std::string(what) + " '" + dir.string() + "' is not a directory");
    if (list_sources(dir, cfg.sources).empty())
      throw ConfigError(std::string(what) + " '" + dir.string() + "' has no file matching '" + cfg.sources + "'");
  }
  if (!fs::exists(cfg.tests_base)) throw ConfigError("tests_base '" + cfg.tests_base.string() + "' does not exist");
  if (!cfg.tests_upgrade.empty() && !fs::exists(cfg.tests_upgrade))
    throw ConfigError("tests_upgrade '" + cfg.tests_upgrade.string() + "' does not exist");
}

}  // namespace regsentry::pipeline
