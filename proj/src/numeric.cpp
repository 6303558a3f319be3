#include "f2ac/numeric.hpp"

#include <cctype>
#include <cmath>

namespace f2ac {

namespace mp = boost::multiprecision;

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Exact conversion of a finite double.
Rational exact_rational(double v) {
  int exponent = 0;
  const double mantissa = std::frexp(v, &exponent);
  // mantissa * 2^53 is an integer for any finite double.
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{BigInt(scaled)};
  if (exponent >= 0) {
    r *= Rational(BigInt(1) << exponent);
  } else {
    r /= Rational(BigInt(1) << -exponent);
  }
  return r;
}

Interval log2_integer(const BigInt& a) {
  const unsigned e = mp::msb(a);
  if (a == (BigInt(1) << e)) return {Rational(e), Rational(e)};
  double lo = 0.0;
  double hi = 0.0;
  if (e <= 52) {
    const double v = std::log2(a.convert_to<double>());
    lo = v;
    hi = v;
  } else {
    const unsigned shift = e - 52;
    const BigInt top = a >> shift;
    lo = std::log2(top.convert_to<double>()) + shift;
    hi = std::log2((top + 1).convert_to<double>()) + shift;
  }
  const double margin = 1e-13 * (1.0 + std::abs(hi));
  return {exact_rational(lo - margin), exact_rational(hi + margin)};
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  const std::string_view num = s.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw std::invalid_argument("not an exact rational \"p/q\": '" + std::string(text) + "'");
  }
  const BigInt p{std::string(num)};
  const BigInt q{std::string(den)};
  if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational r(p, q);
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& value) {
  const BigInt num = mp::numerator(value);
  const BigInt den = mp::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_string(const BigInt& value) { return value.str(); }

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt ipow(const BigInt& base, unsigned exponent) { return mp::pow(base, exponent); }

Rational ipow(const Rational& base, unsigned exponent) {
  return Rational(mp::pow(mp::numerator(base), exponent), mp::pow(mp::denominator(base), exponent));
}

BigInt iroot_floor(const BigInt& x, unsigned m) {
  if (x < 0) throw std::domain_error("iroot_floor of a negative number");
  if (m == 0) throw std::domain_error("iroot_floor with m = 0");
  if (m == 1 || x < 2) return x;
  const unsigned bits = mp::msb(x) + 1;
  BigInt y = BigInt(1) << ((bits + m - 1) / m);  // y^m > x
  for (;;) {
    const BigInt t = ((m - 1) * y + x / mp::pow(y, m - 1)) / m;
    if (t >= y) return y;
    y = t;
  }
}

bool is_perfect_power(const BigInt& x, unsigned m, BigInt* root) {
  const BigInt r = iroot_floor(x, m);
  if (root != nullptr) *root = r;
  return mp::pow(r, m) == x;
}

BigInt floor(const Rational& x) {
  const BigInt n = mp::numerator(x);
  const BigInt d = mp::denominator(x);
  BigInt q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return q;
}

BigInt ceil(const Rational& x) { return -floor(Rational(-x)); }

double to_double(const BigInt& x) { return x.convert_to<double>(); }

double to_double(const Rational& x) {
  const BigInt n = mp::numerator(x);
  const BigInt d = mp::denominator(x);
  if (n == 0) return 0.0;
  const double l = log2_approx(BigInt(mp::abs(n))) - log2_approx(d);
  const double v = std::exp2(l);
  return n < 0 ? -v : v;
}

double log2_approx(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log2 of a non-positive number");
  const unsigned e = mp::msb(x);
  if (e <= 60) return std::log2(x.convert_to<double>());
  const unsigned shift = e - 60;
  return std::log2((x >> shift).convert_to<double>()) + shift;
}

double log2_approx(const Rational& x) {
  return log2_approx(BigInt(mp::numerator(x))) - log2_approx(BigInt(mp::denominator(x)));
}

Interval log2_bounds(const Rational& x) {
  if (x <= 0) throw std::domain_error("log2 of a non-positive number");
  const Interval a = log2_integer(mp::numerator(x));
  const Interval b = log2_integer(mp::denominator(x));
  return {a.lo - b.hi, a.hi - b.lo};
}

Interval sqrt_bounds(const Rational& x) {
  if (x < 0) throw std::domain_error("sqrt of a negative number");
  const BigInt a = mp::numerator(x);
  const BigInt b = mp::denominator(x);
  // sqrt(a/b) = sqrt(a*b)/b
  const BigInt ab = a * b;
  BigInt r;
  if (is_perfect_power(ab, 2, &r)) return {Rational(r, b), Rational(r, b)};
  const BigInt scaled = mp::sqrt(BigInt(ab << 128));
  const BigInt den = b << 64;
  return {Rational(scaled, den), Rational(scaled + 1, den)};
}

bool root_sum_leq(const BigInt& x, const BigInt& y, const BigInt& z, unsigned m) {
  if (x < 0 || y < 0 || z < 0) throw std::domain_error("root_sum_leq needs nonnegative arguments");
  if (m == 1) return x <= y + z;
  if (y == 0) return x <= z;
  if (z == 0) return x <= y;
  // Commensurable radicals: y = ry^m g, z = rz^m g  =>  sum = (ry + rz) g^(1/m).
  const BigInt g = mp::gcd(y, z);
  BigInt ry;
  BigInt rz;
  if (is_perfect_power(y / g, m, &ry) && is_perfect_power(z / g, m, &rz)) {
    return x <= mp::pow(BigInt(ry + rz), m) * g;
  }
  // Incommensurable: equality is impossible, so refining precision terminates.
  for (unsigned precision = 64; precision <= (1u << 16); precision *= 2) {
    const unsigned shift = precision * m;
    const BigInt rx = iroot_floor(x << shift, m);
    const BigInt sy = iroot_floor(y << shift, m);
    const BigInt sz = iroot_floor(z << shift, m);
    if (rx + 1 <= sy + sz) return true;
    if (rx >= sy + sz + 2) return false;
  }
  throw std::runtime_error("root_sum_leq: precision limit reached");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kUndecided:
      return "undecided";
  }
  return "undecided";
}

Verdict leq_interval(const Rational& value, const Interval& bound) {
  if (value <= bound.lo) return Verdict::kHolds;
  if (value > bound.hi) return Verdict::kViolated;
  return Verdict::kUndecided;
}

Verdict geq_interval(const Rational& value, const Interval& bound) {
  if (value >= bound.hi) return Verdict::kHolds;
  if (value < bound.lo) return Verdict::kViolated;
  return Verdict::kUndecided;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below(0)");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace f2ac
