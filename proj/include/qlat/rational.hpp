#pragma once
// Exact rational arithmetic on 128-bit integers, plus a formatter that
// factors out powers of the residue-field size q ("a*q^k/b" strings).
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlat {

using i128 = __int128;

inline i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) { i128 t = a % b; a = b; b = t; }
  return a;
}

inline std::string i128_str(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-v) : (unsigned __int128)v;
  std::string s;
  while (u) { s.push_back(char('0' + (int)(u % 10))); u /= 10; }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

struct Rat {
  i128 num = 0;
  i128 den = 1;

  Rat() = default;
  Rat(long long v) : num(v), den(1) {}
  Rat(i128 n, i128 d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::runtime_error("rational with zero denominator");
    if (den < 0) { den = -den; num = -num; }
    i128 g = gcd128(num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  bool is_integer() const { return den == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::runtime_error("rational division by zero");
    return Rat(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  std::string str() const {
    if (den == 1) return i128_str(num);
    return i128_str(num) + "/" + i128_str(den);
  }
};

// q^k for k possibly negative.
inline Rat rat_qpow(long long q, long long k) {
  Rat r(1);
  if (k >= 0) { for (long long i = 0; i < k; ++i) r.num *= q; }
  else        { for (long long i = 0; i < -k; ++i) r.den *= q; }
  r.normalize();
  return r;
}

// Render r as "a*q^k/b" with a, b coprime to q; trivial parts are omitted,
// e.g. "4", "q^7", "2*q^7", "3/2", "q^-2".
inline std::string rat_qstr(const Rat& r, long long q) {
  if (r.num == 0) return "0";
  i128 a = r.num, b = r.den;
  long long k = 0;
  if (q > 1) {
    while (a % q == 0) { a /= q; ++k; }
    while (b % q == 0) { b /= q; --k; }
  }
  std::string s;
  if (k == 0) {
    s = i128_str(a);
  } else {
    std::string qp = "q^" + std::to_string(k);
    if (a == 1) s = qp;
    else if (a == -1) s = "-" + qp;
    else s = i128_str(a) + "*" + qp;
  }
  if (b != 1) s += "/" + i128_str(b);
  return s;
}

} // namespace qlat
