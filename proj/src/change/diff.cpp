#include "regsentry/change/diff.hpp"

#include "regsentry/error.hpp"

namespace regsentry::change {
namespace {

using minic::AnalyzedUnit;
using minic::FunctionDef;
using minic::StmtPtr;
using minic::TypeTag;

void collect_records(const std::vector<StmtPtr>& stmts, std::set<std::string>& out) {
  for (const auto& s : stmts) {
    if (s->kind == minic::Stmt::Kind::Decl && s->decl_type.is_record())
      out.insert(s->decl_type.record);
    collect_records(s->body, out);
    collect_records(s->else_body, out);
  }
}

std::set<std::string> records_used(const FunctionDef& f) {
  std::set<std::string> out;
  if (f.return_type.is_record()) out.insert(f.return_type.record);
  for (const auto& p : f.params)
    if (p.type.is_record()) out.insert(p.type.record);
  collect_records(f.body, out);
  return out;
}

bool same_record(const AnalyzedUnit& a, const AnalyzedUnit& b, const std::string& name) {
  const auto* ra = a.unit().find_record(name);
  const auto* rb = b.unit().find_record(name);
  return ra && rb && ra->fields == rb->fields;
}

void one_hop(const minic::CallGraph& cg, const std::set<std::string>& changed,
             std::set<std::string>& out) {
  for (const auto& f : changed) {
    if (!cg.contains(f)) continue;
    out.insert(f);
    for (const auto& c : cg.callers(f)) out.insert(c);
    for (const auto& c : cg.callees(f)) out.insert(c);
  }
}

std::set<std::string> entries(const minic::CallGraph& cg, const std::set<std::string>& changed) {
  std::set<std::string> out;
  for (const auto& f : changed) {
    if (!cg.contains(f)) continue;
    auto callers = cg.callers(f);
    if (callers.empty()) out.insert(f);
    out.insert(callers.begin(), callers.end());
  }
  return out;
}

}  // namespace

std::set<std::string> ChangeSet::changed() const {
  std::set<std::string> out = modified;
  out.insert(added.begin(), added.end());
  out.insert(removed.begin(), removed.end());
  return out;
}

ChangeSet diff(const AnalyzedUnit& base, const AnalyzedUnit& upgraded) {
  ChangeSet cs;
  for (const auto& f : base.unit().functions) {
    const FunctionDef* g = upgraded.find_function(f.name);
    if (!g) {
      cs.removed.insert(f.name);
      continue;
    }
    bool equal = minic::structurally_equal(f, *g);
    if (equal)
      for (const auto& r : records_used(f))
        if (!same_record(base, upgraded, r)) equal = false;
    if (!equal) cs.modified.insert(f.name);
  }
  for (const auto& g : upgraded.unit().functions)
    if (!base.find_function(g.name)) cs.added.insert(g.name);
  return cs;
}

AnalysisScope scope(const ChangeSet& cs, const AnalyzedUnit& base, const AnalyzedUnit& upgraded) {
  if (cs.empty()) throw EmptyChange();
  std::set<std::string> changed = cs.changed();
  AnalysisScope out;
  one_hop(base.call_graph(), changed, out.monitored);
  one_hop(upgraded.call_graph(), changed, out.monitored);
  out.base_entries = entries(base.call_graph(), changed);
  out.upgraded_entries = entries(upgraded.call_graph(), changed);
  return out;
}

}  // namespace regsentry::change
