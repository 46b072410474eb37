#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "mql/errors.hpp"

namespace mql {

// Exact rational on a 64-bit numerator and positive denominator, always kept
// reduced. Intermediates run through 128-bit integers; a result that does not
// fit 64 bits throws std::overflow_error instead of wrapping silently.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(long long n) : num_(n) {}  // implicit: integers are rationals
  Rational(long long n, long long d) { assign(n, d); }

  // Accepts "3", "-7", "1/2", "0.25".
  static Rational parse(std::string_view text);

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  long long floor_value() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
  }

  Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

  std::string to_string() const;
  // Exact decimal form ("0.3") when the denominator is 2^a 5^b with a short
  // expansion; falls back to the fraction form otherwise.
  std::string decimal_label() const;

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(w(a.num_) * b.den_ + w(b.num_) * a.den_, w(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(w(a.num_) * b.den_ - w(b.num_) * a.den_, w(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(w(a.num_) * b.num_, w(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw domain_error("rational division by zero");
    return make(w(a.num_) * b.den_, w(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = w(a.num_) * b.den_;
    __int128 r = w(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

private:
  static __int128 w(long long v) { return static_cast<__int128>(v); }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static long long narrow(__int128 v) {
    if (v > std::numeric_limits<long long>::max() ||
        v < std::numeric_limits<long long>::min()) {
      throw std::overflow_error("rational arithmetic overflow");
    }
    return static_cast<long long>(v);
  }

  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  void assign(long long n, long long d) { *this = make(w(n), w(d)); }

  long long num_ = 0;
  long long den_ = 1;
};

inline std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

inline std::string Rational::decimal_label() const {
  long long d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  int k = twos > fives ? twos : fives;
  if (d != 1 || k > 17) return to_string();
  __int128 scale = 1;
  for (int i = 0; i < k; ++i) scale *= 10;
  __int128 v = w(num_) * (scale / den_);
  bool neg = v < 0;
  if (neg) v = -v;
  __int128 ip = v / scale;
  __int128 fp = v % scale;
  std::string out = neg ? "-" : "";
  out += std::to_string(static_cast<long long>(ip));
  if (fp != 0) {
    std::string frac(static_cast<std::size_t>(k), '0');
    for (int i = k - 1; i >= 0; --i) {
      frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(fp % 10));
      fp /= 10;
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  return out;
}

inline Rational Rational::parse(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
  std::string_view body = text.substr(begin, end - begin);
  if (body.empty()) throw parse_error("empty rational literal");

  bool negative = false;
  std::size_t pos = 0;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    pos = 1;
  }

  auto digits = [&](long long& out, int& count) {
    out = 0;
    count = 0;
    while (pos < body.size() && body[pos] >= '0' && body[pos] <= '9') {
      if (out > (std::numeric_limits<long long>::max() - 9) / 10) {
        throw parse_error("rational literal out of range: '" + std::string(text) + "'");
      }
      out = out * 10 + (body[pos] - '0');
      ++pos;
      ++count;
    }
  };

  long long ipart = 0;
  int icount = 0;
  digits(ipart, icount);

  if (pos == body.size()) {
    if (icount == 0) throw parse_error("bad rational literal: '" + std::string(text) + "'");
    return Rational(negative ? -ipart : ipart);
  }

  if (body[pos] == '/') {
    ++pos;
    long long q = 0;
    int qcount = 0;
    digits(q, qcount);
    if (icount == 0 || qcount == 0 || pos != body.size() || q == 0) {
      throw parse_error("bad rational literal: '" + std::string(text) + "'");
    }
    return Rational(negative ? -ipart : ipart, q);
  }

  if (body[pos] == '.') {
    ++pos;
    long long fpart = 0;
    int fcount = 0;
    digits(fpart, fcount);
    if ((icount == 0 && fcount == 0) || pos != body.size() || fcount > 17) {
      throw parse_error("bad rational literal: '" + std::string(text) + "'");
    }
    __int128 scale = 1;
    for (int i = 0; i < fcount; ++i) scale *= 10;
    __int128 n = w(ipart) * scale + fpart;
    if (negative) n = -n;
    return make(n, scale);
  }

  throw parse_error("bad rational literal: '" + std::string(text) + "'");
}

}  // namespace mql
