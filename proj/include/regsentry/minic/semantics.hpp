#pragma once

#include <cstdint>

namespace regsentry::minic {

using Value = std::int64_t;

/// Reduces v to a W-bit two's-complement value.
inline Value wrap(Value v, int width) {
  const std::uint64_t mask = width >= 64 ? ~0ULL : ((1ULL << width) - 1);
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
  const std::uint64_t sign = 1ULL << (width - 1);
  if (u & sign) return static_cast<Value>(u | ~mask);
  return static_cast<Value>(u);
}

inline Value min_value(int width) { return -(Value{1} << (width - 1)); }
inline Value max_value(int width) { return (Value{1} << (width - 1)) - 1; }

/// Truncating signed division with x / 0 = 0.
inline Value divide(Value a, Value b, int width) {
  if (b == 0) return 0;
  return wrap(a / b, width);
}

/// Remainder matching divide, with x % 0 = x.
inline Value remainder(Value a, Value b, int width) {
  if (b == 0) return a;
  return wrap(a % b, width);
}

}  // namespace regsentry::minic
