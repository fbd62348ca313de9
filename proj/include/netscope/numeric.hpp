#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "netscope/errors.hpp"

namespace netscope {

using Digit = std::uint32_t;
using Complex = std::complex<double>;

/// b^e, throwing InstanceTooLarge when the result does not fit in 63 bits.
inline std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  constexpr std::uint64_t limit = std::uint64_t{1} << 62;
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base)
      fail(ErrorCode::InstanceTooLarge,
           std::to_string(base) + "^" + std::to_string(exp) + " overflows 64-bit indices");
    r *= base;
  }
  return r;
}

inline double real_pow(double base, double exp) { return std::pow(base, exp); }

/// Digits of a in base b, least significant first, padded/truncated to `len`.
inline std::vector<Digit> to_digits(std::uint64_t a, Digit b, std::size_t len) {
  std::vector<Digit> out(len, 0);
  for (std::size_t k = 0; k < len && a != 0; ++k) {
    out[k] = static_cast<Digit>(a % b);
    a /= b;
  }
  return out;
}

/// Exact b-adic rational numerator / base^exponent.
struct BAdic {
  std::uint64_t numerator = 0;
  Digit base = 2;
  unsigned exponent = 0;

  double to_double() const {
    return static_cast<double>(numerator) / static_cast<double>(checked_pow(base, exponent));
  }

  /// Digit x_a of the expansion x = x_1 b^-1 + x_2 b^-2 + ...; a is 1-based.
  Digit digit(unsigned a) const {
    if (a == 0 || a > exponent) return 0;
    return static_cast<Digit>((numerator / checked_pow(base, exponent - a)) % base);
  }

  /// floor(x * b^level).
  std::uint64_t floor_scaled(unsigned level) const {
    if (level >= exponent) return numerator * checked_pow(base, level - exponent);
    return numerator / checked_pow(base, exponent - level);
  }

  /// True iff x * b^level is an integer, i.e. x sits on a level-`level` grid line.
  bool on_grid(unsigned level) const {
    if (level >= exponent) return true;
    return numerator % checked_pow(base, exponent - level) == 0;
  }

  /// Remainder of x * b^level above its floor, as (numerator, denominator).
  std::pair<std::uint64_t, std::uint64_t> frac_scaled(unsigned level) const {
    if (level >= exponent) return {0, 1};
    const std::uint64_t den = checked_pow(base, exponent - level);
    return {numerator % den, den};
  }

  friend bool operator<(const BAdic& x, const BAdic& y) {
    const unsigned e = std::max(x.exponent, y.exponent);
    const auto lhs = static_cast<unsigned __int128>(x.numerator) * checked_pow(x.base, e - x.exponent);
    const auto rhs = static_cast<unsigned __int128>(y.numerator) * checked_pow(y.base, e - y.exponent);
    return lhs < rhs;
  }
};

/// e^{2 pi i k / b} for k in [0, b), precomputed once per base.
class UnitRoots {
 public:
  explicit UnitRoots(Digit b) : b_(b), w_(b) {
    for (Digit k = 0; k < b; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(b);
      w_[k] = (k == 0) ? Complex{1.0, 0.0} : Complex{std::cos(angle), std::sin(angle)};
    }
  }

  Digit base() const { return b_; }

  Complex operator()(std::int64_t k) const {
    std::int64_t r = k % static_cast<std::int64_t>(b_);
    if (r < 0) r += b_;
    return w_[static_cast<std::size_t>(r)];
  }

 private:
  Digit b_;
  std::vector<Complex> w_;
};

/// Neumaier-compensated accumulator; order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

/// Cap on enumerated kernel elements / selection tests / coefficient cells.
struct Budget {
  std::uint64_t limit = std::uint64_t{1} << 24;

  void charge(std::uint64_t required, const std::string& what) const {
    if (required > limit)
      fail(ErrorCode::BudgetExceeded,
           what + " needs " + std::to_string(required) + " units, budget is " + std::to_string(limit));
  }
};

inline Budget budget_from_env(Budget fallback = {}) {
  if (const char* env = std::getenv("NETSCOPE_BUDGET")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return Budget{v};
  }
  return fallback;
}

}  // namespace netscope
