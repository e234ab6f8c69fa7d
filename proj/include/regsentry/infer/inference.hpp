#pragma once

#include <vector>

#include "regsentry/change/diff.hpp"
#include "regsentry/infer/property.hpp"
#include "regsentry/trace/trace_log.hpp"

namespace regsentry::infer {

/// Emits, for every monitored point with at least `min_support` samples,
/// each template instance satisfied by all of the point's samples, after
/// suppression:
///   EqConst(v, c) suppresses LowerBound, UpperBound, OneOf and NonZero on v;
///   RelVarVar(v, ==, w) suppresses OffsetEq(v, w, 0).
/// Bounds use the observed extremes. OneOf needs 2..3 distinct values.
/// Pairwise templates relate v to every w that follows it in the schema.
/// Output is in canonical order with status DYNAMIC.
std::vector<Property> infer(const trace::TraceLog& log, const change::AnalysisScope& scope,
                            int min_support = 1);

/// Evaluates `p` on a sample taken at p.point. Throws PointMismatch if the
/// sample belongs to another point or lacks a referenced variable.
bool holds(const Property& p, const trace::SampleView& sample, int width);

}  // namespace regsentry::infer
