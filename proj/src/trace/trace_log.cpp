#include "regsentry/trace/trace_log.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "regsentry/error.hpp"

namespace regsentry::trace {

const char* to_string(Version v) { return v == Version::Base ? "BASE" : "UPGRADED"; }

int TraceLog::find_point(const minic::ProgramPoint& point) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].point == point) return static_cast<int>(i);
  return -1;
}

int TraceLog::intern(const minic::PointInfo& info) {
  int i = find_point(info.point);
  if (i >= 0) return i;
  PointSchema schema{info.point, {}};
  for (const auto& v : info.variables) schema.variables.push_back(v.name);
  points.push_back(std::move(schema));
  return static_cast<int>(points.size()) - 1;
}

std::optional<Value> SampleView::get(const std::string& name) const {
  for (std::size_t i = 0; i < schema_->variables.size(); ++i)
    if (schema_->variables[i] == name) return sample_->values[i];
  return std::nullopt;
}

void append(TraceLog& log, const TraceLog& other) {
  std::vector<int> remap;
  for (const auto& p : other.points) {
    int i = log.find_point(p.point);
    if (i < 0) {
      log.points.push_back(p);
      i = static_cast<int>(log.points.size()) - 1;
    } else if (log.points[static_cast<std::size_t>(i)].variables != p.variables) {
      throw TraceFormatError("schema mismatch for point " + minic::to_string(p.point), 0);
    }
    remap.push_back(i);
  }
  for (const auto& t : other.tests_run) log.tests_run.push_back(t);
  for (auto s : other.samples) {
    s.point = remap[static_cast<std::size_t>(s.point)];
    log.samples.push_back(std::move(s));
  }
}

std::string format_trace(const TraceLog& log) {
  std::ostringstream out;
  out << "trace 1\n";
  out << "version " << to_string(log.version) << "\n";
  out << "width " << log.width << "\n";
  for (const auto& t : log.tests_run) out << "test " << t << "\n";
  for (const auto& p : log.points) {
    out << "point " << p.point.function << ' ' << minic::to_string(p.point.kind);
    if (p.point.kind == minic::PointKind::Loop) out << ' ' << p.point.ordinal;
    for (const auto& v : p.variables) out << ' ' << v;
    out << "\n";
  }
  for (const auto& s : log.samples) {
    out << "s " << s.point << ' ' << s.test << ' ' << s.sequence;
    for (Value v : s.values) out << ' ' << v;
    out << "\n";
  }
  return out.str();
}

void write_trace(const TraceLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_trace(log);
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

template <typename T>
T number(const std::string& word, int line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size())
    throw TraceFormatError(std::string("bad ") + what + " '" + word + "'", line);
  return value;
}

}  // namespace

TraceLog parse_trace(const std::string& text) {
  TraceLog log;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto w = words(line);
    if (w.empty()) continue;
    const std::string& tag = w[0];
    if (!header) {
      if (tag != "trace" || w.size() != 2 || w[1] != "1")
        throw TraceFormatError("expected 'trace 1' header", lineno);
      header = true;
    } else if (tag == "version") {
      if (w.size() != 2 || (w[1] != "BASE" && w[1] != "UPGRADED"))
        throw TraceFormatError("bad version line", lineno);
      log.version = w[1] == "BASE" ? Version::Base : Version::Upgraded;
    } else if (tag == "width") {
      if (w.size() != 2) throw TraceFormatError("bad width line", lineno);
      log.width = number<int>(w[1], lineno, "width");
      if (log.width < 2 || log.width > 32) throw TraceFormatError("width out of range", lineno);
    } else if (tag == "test") {
      if (w.size() != 2) throw TraceFormatError("bad test line", lineno);
      log.tests_run.push_back(w[1]);
    } else if (tag == "point") {
      if (w.size() < 3) throw TraceFormatError("bad point line", lineno);
      PointSchema p;
      p.point.function = w[1];
      std::size_t next = 3;
      if (w[2] == "ENTRY") {
        p.point.kind = minic::PointKind::Entry;
      } else if (w[2] == "EXIT") {
        p.point.kind = minic::PointKind::Exit;
      } else if (w[2] == "LOOP") {
        if (w.size() < 4) throw TraceFormatError("LOOP point without ordinal", lineno);
        p.point.kind = minic::PointKind::Loop;
        p.point.ordinal = number<int>(w[3], lineno, "loop ordinal");
        next = 4;
      } else {
        throw TraceFormatError("unknown point kind '" + w[2] + "'", lineno);
      }
      p.variables.assign(w.begin() + static_cast<std::ptrdiff_t>(next), w.end());
      if (log.find_point(p.point) >= 0) throw TraceFormatError("duplicate point", lineno);
      log.points.push_back(std::move(p));
    } else if (tag == "s") {
      if (w.size() < 4) throw TraceFormatError("bad sample line", lineno);
      TraceSample s;
      s.point = number<int>(w[1], lineno, "point index");
      if (s.point < 0 || s.point >= static_cast<int>(log.points.size()))
        throw TraceFormatError("undeclared point index " + w[1], lineno);
      s.test = w[2];
      s.sequence = number<std::uint64_t>(w[3], lineno, "sequence");
      const auto& schema = log.points[static_cast<std::size_t>(s.point)];
      if (w.size() - 4 != schema.variables.size())
        throw TraceFormatError("sample has " + std::to_string(w.size() - 4) + " values, point " +
                                   minic::to_string(schema.point) + " declares " +
                                   std::to_string(schema.variables.size()),
                               lineno);
      for (std::size_t i = 4; i < w.size(); ++i) {
        Value v = number<Value>(w[i], lineno, "value");
        if (v < minic::min_value(log.width) || v > minic::max_value(log.width))
          throw TraceFormatError("value " + w[i] + " does not fit the trace width", lineno);
        s.values.push_back(v);
      }
      log.samples.push_back(std::move(s));
    } else {
      throw TraceFormatError("unknown record '" + tag + "'", lineno);
    }
  }
  if (!header) throw TraceFormatError("missing 'trace 1' header", lineno + 1);
  return log;
}

TraceLog read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

}  // namespace regsentry::trace
