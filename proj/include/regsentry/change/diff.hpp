#pragma once

#include <set>
#include <string>

#include "regsentry/minic/analyzer.hpp"

namespace regsentry::change {

/// Function-level difference between two program versions.
struct ChangeSet {
  std::set<std::string> modified;  // in both versions, bodies or signatures differ
  std::set<std::string> added;     // only in the upgraded version
  std::set<std::string> removed;   // only in the base version

  bool empty() const { return modified.empty() && added.empty() && removed.empty(); }
  /// Functions treated as changed for scoping: modified, added and removed.
  std::set<std::string> changed() const;
};

/// Functions to trace and model-checking entry points of each version.
struct AnalysisScope {
  std::set<std::string> monitored;
  std::set<std::string> base_entries;
  std::set<std::string> upgraded_entries;
};

/// Two functions are equal iff signatures and bodies are structurally
/// identical. A change to a record layout marks every function mentioning
/// that record modified.
ChangeSet diff(const minic::AnalyzedUnit& base, const minic::AnalyzedUnit& upgraded);

/// Changed functions plus their direct callers and callees in either
/// version. Entries are the direct callers of changed functions in the
/// respective version; an uncalled changed function is its own entry.
/// Throws EmptyChange when `cs` is empty.
AnalysisScope scope(const ChangeSet& cs, const minic::AnalyzedUnit& base,
                    const minic::AnalyzedUnit& upgraded);

}  // namespace regsentry::change
