#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace biserial {

// expression templates off: generic code expects arithmetic to yield values
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                          boost::multiprecision::et_off>;
using Rat =
    boost::multiprecision::number<boost::multiprecision::backends::rational_adaptor<
                                      boost::multiprecision::cpp_int_backend<>>,
                                  boost::multiprecision::et_off>;

inline Int rat_num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int rat_den(const Rat& x) { return boost::multiprecision::denominator(x); }

inline Rat make_rat(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rat(Int(num)) / Rat(Int(den));
}

/// Serializes as "n" when the denominator is 1, else "n/d" (lowest terms,
/// positive denominator; both guaranteed by the backing type).
inline std::string rat_to_string(const Rat& x) {
  Int n = rat_num(x), d = rat_den(x);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

/// Parses "n" or "n/d" with optional leading sign. Throws on malformed input.
inline Rat rat_from_string(const std::string& s) {
  auto bad = [&] { return std::invalid_argument("malformed rational: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int n(s.substr(0, slash));
    Int d(s.substr(slash + 1));
    if (d == 0) throw std::domain_error("rational with zero denominator");
    return Rat(n) / Rat(d);
  } catch (const std::runtime_error&) {
    throw bad();
  }
}

}  // namespace biserial
