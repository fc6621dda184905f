#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fp.hpp"
#include "rational.hpp"

namespace biserial {

/// Runtime description of the scalar field, passed wherever generic code has
/// to materialize constants (F_p elements need the modulus).
template <class K>
struct FieldCtx;

template <>
struct FieldCtx<Rat> {
  Rat zero() const { return Rat(0); }
  Rat one() const { return Rat(1); }
  Rat from_int(std::int64_t n) const { return Rat(n); }
  std::string name() const { return "Q"; }
};

template <>
struct FieldCtx<Fp> {
  std::int64_t p = 2;
  FieldCtx() = default;
  explicit FieldCtx(std::int64_t prime) : p(prime) {
    if (prime < 2) throw std::domain_error("field modulus must be a prime >= 2");
  }
  Fp zero() const { return Fp(0, p); }
  Fp one() const { return Fp(1, p); }
  Fp from_int(std::int64_t n) const { return Fp(n, p); }
  std::string name() const { return "F" + std::to_string(p); }
};

template <class K>
bool is_zero(const K& x) { return x == K(); }
inline bool is_zero(const Fp& x) { return x.is_zero(); }
inline bool is_zero(const Rat& x) { return x == 0; }

inline std::string scalar_to_string(const Rat& x) { return rat_to_string(x); }
inline std::string scalar_to_string(const Fp& x) { return fp_to_string(x); }

}  // namespace biserial
