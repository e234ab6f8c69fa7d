#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "regsentry/minic/semantics.hpp"
#include "regsentry/sat/solver.hpp"

namespace regsentry::bmc {

/// Literal of an and-inverter graph: 2*node + complement bit. Node 0 is the
/// constant false.
struct AigLit {
  std::uint32_t code = 0;

  std::uint32_t node() const { return code >> 1; }
  bool complemented() const { return code & 1; }
  AigLit operator~() const { return AigLit{code ^ 1u}; }

  friend bool operator==(AigLit, AigLit) = default;
};

inline constexpr AigLit kFalse{0};
inline constexpr AigLit kTrue{1};

/// Structurally hashed and-inverter graph with constant folding.
class Aig {
 public:
  Aig();

  AigLit input();
  AigLit land(AigLit a, AigLit b);
  AigLit lor(AigLit a, AigLit b) { return ~land(~a, ~b); }
  AigLit lxor(AigLit a, AigLit b);
  AigLit lequiv(AigLit a, AigLit b) { return ~lxor(a, b); }
  AigLit implies(AigLit a, AigLit b) { return lor(~a, b); }
  AigLit ite(AigLit c, AigLit t, AigLit e);

  std::size_t num_nodes() const { return fanin0_.size(); }
  std::size_t num_inputs() const { return inputs_.size(); }
  bool is_input(std::uint32_t node) const { return input_index_[node] >= 0; }
  int input_index(std::uint32_t node) const { return input_index_[node]; }
  std::uint32_t input_node(std::size_t i) const { return inputs_[i]; }
  AigLit fanin0(std::uint32_t node) const { return fanin0_[node]; }
  AigLit fanin1(std::uint32_t node) const { return fanin1_[node]; }

  /// Values of every node under the given input assignment.
  std::vector<bool> simulate(const std::vector<bool>& input_values) const;
  static bool value(const std::vector<bool>& nodes, AigLit l) {
    return nodes[l.node()] != l.complemented();
  }

 private:
  std::vector<AigLit> fanin0_;
  std::vector<AigLit> fanin1_;
  std::vector<int> input_index_;
  std::vector<std::uint32_t> inputs_;
  std::unordered_map<std::uint64_t, std::uint32_t> strash_;
};

/// Tseitin encoding of the cone of influence of `root`, with `root`
/// asserted. `input_vars[i]` is the DIMACS variable of AIG input i, or 0 if
/// the input lies outside the cone.
struct ConeCnf {
  sat::Cnf cnf;
  std::vector<int> input_vars;
};
ConeCnf to_cnf(const Aig& aig, AigLit root);

/// W-bit word, least significant bit first.
using Word = std::vector<AigLit>;

/// Word-level circuits in two's complement with wraparound. Division and
/// remainder are total: x / 0 = 0 and x % 0 = x.
class BitBlaster {
 public:
  BitBlaster(Aig& aig, int width) : aig_(aig), width_(width) {}

  int width() const { return width_; }
  Aig& aig() { return aig_; }

  Word constant(minic::Value v) const;
  Word fresh();
  Word add(const Word& a, const Word& b);
  Word sub(const Word& a, const Word& b);
  Word neg(const Word& a);
  Word mul(const Word& a, const Word& b);
  Word sdiv(const Word& a, const Word& b);
  Word srem(const Word& a, const Word& b);
  Word ite(AigLit c, const Word& t, const Word& e);
  Word from_bool(AigLit b) const;

  AigLit eq(const Word& a, const Word& b);
  AigLit ult(const Word& a, const Word& b);
  AigLit slt(const Word& a, const Word& b);
  AigLit sle(const Word& a, const Word& b) { return ~slt(b, a); }
  AigLit nonzero(const Word& a);

  /// Signed value of `w` from simulated node values.
  static minic::Value decode(const std::vector<bool>& nodes, const Word& w);

 private:
  Word add_with_carry(const Word& a, const Word& b, AigLit carry);
  void udivrem(const Word& a, const Word& b, Word& q, Word& r);

  Aig& aig_;
  int width_;
};

}  // namespace regsentry::bmc
