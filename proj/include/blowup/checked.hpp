#pragma once

#include <cstdint>

#include "blowup/error.hpp"

namespace blowup::checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw error(errc::overflow, "integer overflow in addition");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw error(errc::overflow, "integer overflow in multiplication");
  return r;
}

inline std::int64_t neg(std::int64_t a) { return mul(a, -1); }

// (-1)^n
constexpr std::int64_t sign_power(long n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace blowup::checked
