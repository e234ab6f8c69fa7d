#include "regsentry/bmc/aig.hpp"

#include <algorithm>

namespace regsentry::bmc {

Aig::Aig() {
  fanin0_.push_back(kFalse);
  fanin1_.push_back(kFalse);
  input_index_.push_back(-1);
}

AigLit Aig::input() {
  const auto node = static_cast<std::uint32_t>(fanin0_.size());
  fanin0_.push_back(kFalse);
  fanin1_.push_back(kFalse);
  input_index_.push_back(static_cast<int>(inputs_.size()));
  inputs_.push_back(node);
  return AigLit{node << 1};
}

AigLit Aig::land(AigLit a, AigLit b) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue) return a;
  if (a == b) return a;
  if (a == ~b) return kFalse;
  if (a.code > b.code) std::swap(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(a.code) << 32) | b.code;
  auto it = strash_.find(key);
  if (it != strash_.end()) return AigLit{it->second << 1};
  const auto node = static_cast<std::uint32_t>(fanin0_.size());
  fanin0_.push_back(a);
  fanin1_.push_back(b);
  input_index_.push_back(-1);
  strash_.emplace(key, node);
  return AigLit{node << 1};
}

AigLit Aig::lxor(AigLit a, AigLit b) {
  if (a == kFalse) return b;
  if (b == kFalse) return a;
  if (a == kTrue) return ~b;
  if (b == kTrue) return ~a;
  if (a == b) return kFalse;
  if (a == ~b) return kTrue;
  return lor(land(a, ~b), land(~a, b));
}

AigLit Aig::ite(AigLit c, AigLit t, AigLit e) {
  if (c == kTrue || t == e) return t;
  if (c == kFalse) return e;
  return lor(land(c, t), land(~c, e));
}

std::vector<bool> Aig::simulate(const std::vector<bool>& input_values) const {
  std::vector<bool> v(fanin0_.size(), false);
  for (std::uint32_t n = 1; n < fanin0_.size(); ++n) {
    if (input_index_[n] >= 0) {
      const auto i = static_cast<std::size_t>(input_index_[n]);
      v[n] = i < input_values.size() && input_values[i];
    } else {
      v[n] = value(v, fanin0_[n]) && value(v, fanin1_[n]);
    }
  }
  return v;
}

ConeCnf to_cnf(const Aig& aig, AigLit root) {
  ConeCnf out;
  out.input_vars.assign(aig.num_inputs(), 0);
  std::vector<int> var_of(aig.num_nodes(), 0);
  std::vector<std::uint32_t> stack{root.node()};
  std::vector<std::uint32_t> order;
  // Iterative post-order so fanins receive variables first.
  std::vector<char> state(aig.num_nodes(), 0);
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    if (state[n] == 2) {
      stack.pop_back();
      continue;
    }
    if (n == 0 || aig.is_input(n) || state[n] == 1) {
      if (state[n] != 2) order.push_back(n);
      state[n] = 2;
      stack.pop_back();
      continue;
    }
    state[n] = 1;
    stack.push_back(aig.fanin0(n).node());
    stack.push_back(aig.fanin1(n).node());
  }
  auto lit = [&](AigLit l) { return l.complemented() ? -var_of[l.node()] : var_of[l.node()]; };
  for (std::uint32_t n : order) {
    var_of[n] = ++out.cnf.num_vars;
    if (n == 0) {
      out.cnf.clauses.push_back({-var_of[n]});
    } else if (aig.is_input(n)) {
      out.input_vars[static_cast<std::size_t>(aig.input_index(n))] = var_of[n];
    } else {
      const int x = var_of[n];
      const int a = lit(aig.fanin0(n));
      const int b = lit(aig.fanin1(n));
      out.cnf.clauses.push_back({-x, a});
      out.cnf.clauses.push_back({-x, b});
      out.cnf.clauses.push_back({x, -a, -b});
    }
  }
  out.cnf.clauses.push_back({lit(root)});
  return out;
}

Word BitBlaster::constant(minic::Value v) const {
  Word w(static_cast<std::size_t>(width_));
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < width_; ++i) w[static_cast<std::size_t>(i)] = ((u >> i) & 1u) ? kTrue : kFalse;
  return w;
}

Word BitBlaster::fresh() {
  Word w(static_cast<std::size_t>(width_));
  for (auto& b : w) b = aig_.input();
  return w;
}

Word BitBlaster::from_bool(AigLit b) const {
  Word w(static_cast<std::size_t>(width_), kFalse);
  w[0] = b;
  return w;
}

Word BitBlaster::add_with_carry(const Word& a, const Word& b, AigLit carry) {
  Word out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    AigLit x = aig_.lxor(a[i], b[i]);
    out[i] = aig_.lxor(x, carry);
    carry = aig_.lor(aig_.land(a[i], b[i]), aig_.land(x, carry));
  }
  return out;
}

Word BitBlaster::add(const Word& a, const Word& b) { return add_with_carry(a, b, kFalse); }

Word BitBlaster::sub(const Word& a, const Word& b) {
  Word nb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) nb[i] = ~b[i];
  return add_with_carry(a, nb, kTrue);
}

Word BitBlaster::neg(const Word& a) { return sub(Word(a.size(), kFalse), a); }

Word BitBlaster::mul(const Word& a, const Word& b) {
  Word acc(a.size(), kFalse);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == kFalse) continue;
    Word partial(a.size(), kFalse);
    for (std::size_t j = 0; j + i < a.size(); ++j) partial[j + i] = aig_.land(a[j], b[i]);
    acc = add(acc, partial);
  }
  return acc;
}

void BitBlaster::udivrem(const Word& a, const Word& b, Word& q, Word& r) {
  const std::size_t w = a.size();
  Word rem(w + 1, kFalse);
  Word divisor(b);
  divisor.push_back(kFalse);
  q.assign(w, kFalse);
  for (std::size_t step = w; step-- > 0;) {
    // rem = (rem << 1) | a[step]
    for (std::size_t i = w; i > 0; --i) rem[i] = rem[i - 1];
    rem[0] = a[step];
    AigLit fits = ~ult(rem, divisor);
    Word diff = sub(rem, divisor);
    rem = ite(fits, diff, rem);
    q[step] = fits;
  }
  rem.pop_back();
  r = std::move(rem);
}

Word BitBlaster::sdiv(const Word& a, const Word& b) {
  const AigLit sa = a.back(), sb = b.back();
  Word abs_a = ite(sa, neg(a), a);
  Word abs_b = ite(sb, neg(b), b);
  Word q, r;
  udivrem(abs_a, abs_b, q, r);
  Word signed_q = ite(aig_.lxor(sa, sb), neg(q), q);
  return ite(nonzero(b), signed_q, constant(0));
}

Word BitBlaster::srem(const Word& a, const Word& b) {
  const AigLit sa = a.back(), sb = b.back();
  Word abs_a = ite(sa, neg(a), a);
  Word abs_b = ite(sb, neg(b), b);
  Word q, r;
  udivrem(abs_a, abs_b, q, r);
  Word signed_r = ite(sa, neg(r), r);
  return ite(nonzero(b), signed_r, a);
}

Word BitBlaster::ite(AigLit c, const Word& t, const Word& e) {
  if (c == kTrue) return t;
  if (c == kFalse) return e;
  Word out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = aig_.ite(c, t[i], e[i]);
  return out;
}

AigLit BitBlaster::eq(const Word& a, const Word& b) {
  AigLit acc = kTrue;
  for (std::size_t i = 0; i < a.size(); ++i) acc = aig_.land(acc, aig_.lequiv(a[i], b[i]));
  return acc;
}

AigLit BitBlaster::ult(const Word& a, const Word& b) {
  AigLit lt = kFalse;
  for (std::size_t i = 0; i < a.size(); ++i) {
    AigLit bit_lt = aig_.land(~a[i], b[i]);
    AigLit same = aig_.lequiv(a[i], b[i]);
    lt = aig_.lor(bit_lt, aig_.land(same, lt));
  }
  return lt;
}

AigLit BitBlaster::slt(const Word& a, const Word& b) {
  Word fa(a), fb(b);
  fa.back() = ~fa.back();
  fb.back() = ~fb.back();
  return ult(fa, fb);
}

AigLit BitBlaster::nonzero(const Word& a) {
  AigLit acc = kFalse;
  for (AigLit b : a) acc = aig_.lor(acc, b);
  return acc;
}

minic::Value BitBlaster::decode(const std::vector<bool>& nodes, const Word& w) {
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (Aig::value(nodes, w[i])) u |= 1ULL << i;
  return minic::wrap(static_cast<minic::Value>(u), static_cast<int>(w.size()));
}

}  // namespace regsentry::bmc
