#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace gipeps::detail {

// Exact rational arithmetic for Clebsch-Gordan and 6j evaluation.
// Numerators and denominators stay small for the spins handled here
// (factorials up to ~13!); intermediate products use 128-bit width.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::overflow_error("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static Rat make128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    const __int128 lim = static_cast<__int128>(__INT64_MAX__);
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rat: overflow");
    Rat r;
    r.num = static_cast<long long>(n);
    r.den = static_cast<long long>(d);
    return r;
  }

  friend Rat operator*(const Rat& a, const Rat& b) {
    return make128(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::overflow_error("Rat: division by zero");
    return make128(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
  }
  friend Rat operator+(const Rat& a, const Rat& b) {
    return make128(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make128(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
  }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// n! as an exact rational; n must be >= 0 for a valid call site.
inline Rat factorial(long long n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  Rat r(1);
  for (long long k = 2; k <= n; ++k) r = r * Rat(k);
  return r;
}

}  // namespace gipeps::detail
