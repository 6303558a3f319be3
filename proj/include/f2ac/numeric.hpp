#pragma once

// Exact integer and rational helpers shared by every module.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace f2ac {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Rng = std::mt19937_64;

/// Raised when an enumeration would exceed its documented work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "p/q" or "p" (optionally signed). Floats are rejected.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);
BigInt ipow(const BigInt& base, unsigned exponent);
Rational ipow(const Rational& base, unsigned exponent);

/// floor(x^(1/m)) for x >= 0, m >= 1.
BigInt iroot_floor(const BigInt& x, unsigned m);
bool is_perfect_power(const BigInt& x, unsigned m, BigInt* root = nullptr);

BigInt floor(const Rational& x);
BigInt ceil(const Rational& x);

double to_double(const BigInt& x);
double to_double(const Rational& x);
/// log2 of a positive integer, accurate to double precision for any size.
double log2_approx(const BigInt& x);
double log2_approx(const Rational& x);

/// Closed interval of rationals.
struct Interval {
  Rational lo;
  Rational hi;
};

/// Rational enclosure of log2(x) for x > 0. Exact (lo == hi) when x is a
/// power of two; otherwise width about 1e-12.
Interval log2_bounds(const Rational& x);

/// Rational enclosure of sqrt(x) for x >= 0 with relative width about 2^-64.
Interval sqrt_bounds(const Rational& x);

/// Exact decision of x^(1/m) <= y^(1/m) + z^(1/m) for nonnegative integers.
bool root_sum_leq(const BigInt& x, const BigInt& y, const BigInt& z, unsigned m);

/// Three-valued verdict of a certified comparison.
enum class Verdict { kHolds, kViolated, kUndecided };
std::string_view to_string(Verdict v);

/// Verdict for "value <= bound" where the bound is only known to lie in an interval.
Verdict leq_interval(const Rational& value, const Interval& bound);
/// Verdict for "value >= bound".
Verdict geq_interval(const Rational& value, const Interval& bound);

/// Uniform integer in [0, bound) from raw 64-bit draws; identical on every
/// platform for a given engine state (unlike std::uniform_int_distribution).
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Fisher-Yates with uniform_below.
template <class It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace f2ac
