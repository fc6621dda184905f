#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace biserial {

/// Element of a prime field F_p with the modulus carried per element.
/// Intended for small p (enumeration work); arithmetic between elements of
/// different moduli is a logic error.
struct Fp {
  std::int64_t v = 0;
  std::int64_t p = 0;  // 0 marks an uninitialized element; any op with one asserts

  Fp() = default;
  Fp(std::int64_t value, std::int64_t prime) : p(prime) {
    assert(prime > 1);
    v = value % prime;
    if (v < 0) v += prime;
  }

  bool is_zero() const { return v == 0; }

  friend Fp operator+(Fp a, Fp b) {
    assert(a.p == b.p && a.p > 1);
    return Fp(a.v + b.v, a.p);
  }
  friend Fp operator-(Fp a, Fp b) {
    assert(a.p == b.p && a.p > 1);
    return Fp(a.v - b.v, a.p);
  }
  friend Fp operator*(Fp a, Fp b) {
    assert(a.p == b.p && a.p > 1);
    return Fp(a.v * b.v, a.p);
  }
  Fp operator-() const { return Fp(-v, p); }
  Fp& operator+=(Fp b) { return *this = *this + b; }
  Fp& operator-=(Fp b) { return *this = *this - b; }
  Fp& operator*=(Fp b) { return *this = *this * b; }

  Fp inverse() const {
    if (v == 0) throw std::domain_error("inverse of zero in F_p");
    // extended Euclid; p prime so gcd(v, p) = 1
    std::int64_t a = v, b = p, x0 = 1, x1 = 0;
    while (b != 0) {
      std::int64_t q = a / b;
      std::int64_t t = a - q * b; a = b; b = t;
      t = x0 - q * x1; x0 = x1; x1 = t;
    }
    return Fp(x0, p);
  }
  friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }

  friend bool operator==(Fp a, Fp b) {
    assert(a.p == b.p);
    return a.v == b.v;
  }
  friend bool operator!=(Fp a, Fp b) { return !(a == b); }
};

inline std::string fp_to_string(const Fp& x) { return std::to_string(x.v); }

}  // namespace biserial
