#pragma once

// External angles: exact elements of Q/Z acted on by t -> d*t and by the
// conjugation t -> -t.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mating/errors.hpp"

namespace mating {

using BigInt = boost::multiprecision::cpp_int;

class Angle {
 public:
  Angle() : num_(0), den_(1) {}

  // Reduces num/den modulo 1 into lowest terms; negative numerators wrap.
  Angle(BigInt num, BigInt den) {
    if (den <= 0) throw InvalidDenominator();
    num %= den;
    if (num < 0) num += den;
    BigInt g = boost::multiprecision::gcd(num, den);
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
    if (num_ == 0) den_ = 1;
  }

  Angle(long long num, long long den) : Angle(BigInt(num), BigInt(den)) {}

  // Accepts "n/d" or a bare integer "n" (which is 0 mod 1).
  static Angle parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view s) {
      s = trim(s);
      if (s.empty()) throw ParseError("malformed angle '" + std::string(text) + "'");
      std::size_t start = (s.front() == '-' || s.front() == '+') ? 1 : 0;
      if (start == s.size()) throw ParseError("malformed angle '" + std::string(text) + "'");
      for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ParseError("malformed angle '" + std::string(text) + "'");
      }
      return BigInt(std::string(s));
    };
    if (slash == std::string_view::npos) return Angle(parse_int(text), BigInt(1));
    return Angle(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  std::string str() const { return num_.str() + "/" + den_.str(); }

  double to_double() const {
    // Scale down huge operands so the conversion never overflows.
    BigInt n = num_, d = den_;
    std::size_t bits = boost::multiprecision::msb(d);
    if (bits > 900) {
      std::size_t shift = bits - 900;
      n >>= shift;
      d >>= shift;
    }
    return n.convert_to<double>() / d.convert_to<double>();
  }

  friend bool operator==(const Angle& a, const Angle& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  friend std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Angle& a) { return os << a.str(); }

 private:
  BigInt num_;
  BigInt den_;
};

inline Angle operator+(const Angle& a, const Angle& b) {
  return Angle(a.numerator() * b.denominator() + b.numerator() * a.denominator(),
               a.denominator() * b.denominator());
}

inline Angle operator-(const Angle& a, const Angle& b) {
  return Angle(a.numerator() * b.denominator() - b.numerator() * a.denominator(),
               a.denominator() * b.denominator());
}

inline Angle times_d(const Angle& a, unsigned d) {
  return Angle(a.numerator() * d, a.denominator());
}

inline Angle conjugate(const Angle& a) { return Angle(-a.numerator(), a.denominator()); }

// The d preimages of a under t -> d*t, in increasing order.
inline std::vector<Angle> preimages(const Angle& a, unsigned d) {
  std::vector<Angle> out;
  out.reserve(d);
  for (unsigned k = 0; k < d; ++k) {
    out.emplace_back(a.numerator() + k * a.denominator(), a.denominator() * d);
  }
  return out;
}

struct OrbitType {
  std::size_t preperiod = 0;
  std::size_t period = 1;

  friend bool operator==(const OrbitType&, const OrbitType&) = default;
  friend auto operator<=>(const OrbitType&, const OrbitType&) = default;
};

// Smallest (k, p) with d^k a = d^(k+p) a mod 1. Split the denominator as u*v
// with every prime of u dividing d and gcd(v, d) = 1: k is the least k with
// u | d^k and p is the multiplicative order of d modulo v.
inline OrbitType orbit_type(const Angle& a, unsigned d = 2, std::uint64_t order_budget = 50'000'000) {
  if (d < 2) throw InvalidArgument("degree must be at least 2");
  BigInt v = a.denominator();
  BigInt u = 1;
  const BigInt dd = d;
  for (;;) {
    BigInt g = boost::multiprecision::gcd(v, dd);
    if (g == 1) break;
    v /= g;
    u *= g;
  }
  OrbitType out;
  BigInt pk = 1;
  while (pk % u != 0) {
    pk *= d;
    ++out.preperiod;
  }
  if (v == 1) return out;
  BigInt x = dd % v;
  std::uint64_t p = 1;
  while (x != 1) {
    x = (x * d) % v;
    if (++p > order_budget) throw BudgetExceeded("period of " + a.str() + " exceeds the search budget");
  }
  out.period = static_cast<std::size_t>(p);
  return out;
}

inline bool is_periodic(const Angle& a, unsigned d = 2) { return orbit_type(a, d).preperiod == 0; }

// --- circle geometry -----------------------------------------------------

// Counter-clockwise length of the arc from `from` to `to`, in [0, 1).
inline Angle arc_length(const Angle& from, const Angle& to) { return to - from; }

// x lies strictly inside the counter-clockwise arc from `from` to `to`.
inline bool in_open_arc(const Angle& x, const Angle& from, const Angle& to) {
  if (x == from || x == to) return false;
  return arc_length(from, x) < arc_length(from, to);
}

inline bool in_closed_arc(const Angle& x, const Angle& from, const Angle& to) {
  return x == from || x == to || in_open_arc(x, from, to);
}

// Length of the shorter arc between a and b (at most 1/2).
inline Angle chord_length(const Angle& a, const Angle& b) {
  Angle ab = arc_length(a, b);
  Angle ba = arc_length(b, a);
  return ab < ba ? ab : ba;
}

// Chords {a,b} and {c,d} cross in the open disk. Shared endpoints never cross.
inline bool chords_cross(const Angle& a, const Angle& b, const Angle& c, const Angle& d) {
  if (a == b || c == d || a == c || a == d || b == c || b == d) return false;
  return in_open_arc(c, a, b) != in_open_arc(d, a, b);
}

}  // namespace mating
