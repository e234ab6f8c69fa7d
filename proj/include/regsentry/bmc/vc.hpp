#pragma once

#include <chrono>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "regsentry/bmc/aig.hpp"
#include "regsentry/bmc/instrument.hpp"
#include "regsentry/sat/solver.hpp"

namespace regsentry::bmc {

struct BmcConfig {
  int unroll_bound = 5;
  int inline_depth = 16;
  int bit_width = 16;
  sat::Budget budget{100000, -1, std::chrono::milliseconds(10000)};
  /// Check that N iterations suffice instead of assuming it.
  bool unwinding_assertions = false;
};

/// Throws ConfigError when a field is out of range.
void validate(const BmcConfig& cfg);

/// A variable slot written by a statement. When `array` is set the slot
/// index is the value of `index` and the name is `array.<index>`.
struct Binding {
  std::string name;
  Word value;
  std::string array;
  Word index;
};

struct TraceEvent {
  int line = 0;  // printed line of the instrumented unit
  std::string function;
  AigLit guard = kFalse;
  std::vector<Binding> bindings;
  int assertion = -1;  // index into VcSet::assertions
};

struct AssertionInstance {
  std::size_t property = 0;
  AigLit violated = kFalse;
  std::size_t event = 0;
  bool after_havoc = false;
};

/// One symbolic W-bit slot of an entry parameter.
struct InputSlot {
  std::string name;  // `x`, `prod.items`, `arr.2`
  std::size_t param = 0;
  std::size_t slot = 0;
  Word bits;
};

/// Verification condition of one property: satisfiable iff some execution
/// within the bounds reaches one of its assertions and falsifies it.
struct Condition {
  std::size_t property = 0;
  AigLit formula = kFalse;
};

/// Encoding of every assertion reachable from one entry.
struct VcSet {
  std::shared_ptr<Aig> aig;
  std::string entry;
  int width = 16;
  std::vector<InputSlot> inputs;
  std::vector<std::size_t> param_slots;  // slot count per entry parameter
  std::vector<TraceEvent> events;
  std::vector<AssertionInstance> assertions;
  std::vector<Condition> conditions;
  /// Per property of the instrumented unit.
  std::vector<bool> reached;
  std::vector<bool> depth_exceeded;
  /// Functions replaced by unconstrained results at the depth limit.
  std::set<std::string> havocked;
  /// True when some execution needs more than N iterations (only built
  /// with unwinding_assertions).
  AigLit unwinding_violated = kFalse;
};

/// Inlines calls up to depth D, unrolls each loop N times followed by an
/// unwinding assumption, and encodes the entry's parameters as free W-bit
/// inputs. Out-of-bounds accesses are excluded by assumptions. Throws
/// UnknownFunction if `entry` does not exist.
VcSet build_vc(const InstrumentedUnit& iu, const std::string& entry, const BmcConfig& cfg);

}  // namespace regsentry::bmc
