#include "regsentry/infer/inference.hpp"

#include <algorithm>
#include <set>

#include "regsentry/error.hpp"

namespace regsentry::infer {

namespace {

struct Column {
  Value min = 0;
  Value max = 0;
  std::set<Value> distinct;  // capped at 4 entries
  bool zero = false;
};

void infer_point(const trace::PointSchema& schema, const std::vector<const trace::TraceSample*>& samples,
                 int width, std::vector<Property>& out) {
  const std::size_t n = schema.variables.size();
  std::vector<Column> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    Column& c = cols[i];
    c.min = c.max = samples.front()->values[i];
    for (const auto* s : samples) {
      Value v = s->values[i];
      c.min = std::min(c.min, v);
      c.max = std::max(c.max, v);
      if (v == 0) c.zero = true;
      if (c.distinct.size() < 4) c.distinct.insert(v);
    }
  }
  auto emit = [&](Formula f) { out.push_back(make_property(schema.point, std::move(f))); };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& v = schema.variables[i];
    const Column& c = cols[i];
    if (c.min == c.max) {
      emit(Formula::eq_const(v, c.min));
      continue;
    }
    emit(Formula::lower_bound(v, c.min));
    emit(Formula::upper_bound(v, c.max));
    if (!c.zero) emit(Formula::non_zero(v));
    if (c.distinct.size() >= 2 && c.distinct.size() <= 3)
      emit(Formula::one_of(v, std::vector<Value>(c.distinct.begin(), c.distinct.end())));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool eq = true, ne = true, ge = true, le = true, offset = true;
      const Value k = minic::wrap(samples.front()->values[i] - samples.front()->values[j], width);
      for (const auto* s : samples) {
        Value a = s->values[i], b = s->values[j];
        eq = eq && a == b;
        ne = ne && a != b;
        ge = ge && a >= b;
        le = le && a <= b;
        offset = offset && a == minic::wrap(b + k, width);
      }
      const std::string& v = schema.variables[i];
      const std::string& w = schema.variables[j];
      if (eq) emit(Formula::rel(v, RelOp::Eq, w));
      if (ne) emit(Formula::rel(v, RelOp::Ne, w));
      if (ge) emit(Formula::rel(v, RelOp::Ge, w));
      if (le) emit(Formula::rel(v, RelOp::Le, w));
      if (offset && !(eq && k == 0)) emit(Formula::offset_eq(v, w, k));
    }
  }
}

}  // namespace

std::vector<Property> infer(const trace::TraceLog& log, const change::AnalysisScope& scope,
                            int min_support) {
  std::vector<std::vector<const trace::TraceSample*>> by_point(log.points.size());
  for (const auto& s : log.samples) by_point[static_cast<std::size_t>(s.point)].push_back(&s);

  std::vector<Property> out;
  for (std::size_t p = 0; p < log.points.size(); ++p) {
    const auto& schema = log.points[p];
    if (!scope.monitored.count(schema.point.function)) continue;
    const auto& samples = by_point[p];
    if (samples.empty() || static_cast<int>(samples.size()) < std::max(1, min_support)) continue;
    infer_point(schema, samples, log.width, out);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

bool holds(const Property& p, const trace::SampleView& sample, int width) {
  if (!(sample.point() == p.point))
    throw PointMismatch("property at " + minic::to_string(p.point) + " evaluated on sample from " +
                        minic::to_string(sample.point()));
  return evaluate(
      p.formula, [&](const std::string& name) { return sample.get(name); }, width);
}

}  // namespace regsentry::infer
