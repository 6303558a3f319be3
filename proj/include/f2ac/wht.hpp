#pragma once

// Walsh-Hadamard transform over F_2^n and large spectra.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "f2ac/f2n.hpp"
#include "f2ac/numeric.hpp"
#include "f2ac/parallel.hpp"

namespace f2ac {

struct FunctionTag {};
struct SpectrumTag {};

/// Dense table of 2^dim scalars indexed by the element word.
template <class Scalar, class Tag>
class Table {
 public:
  using value_type = Scalar;

  explicit Table(int dim = 1) : dim_(dim), values_(std::size_t{1} << checked(dim)) {}
  Table(int dim, std::vector<Scalar> values) : dim_(dim), values_(std::move(values)) {
    checked(dim);
    if (values_.size() != (std::size_t{1} << dim)) throw DimensionError("table length must be 2^dim");
  }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }
  Scalar& operator[](std::size_t i) { return values_[i]; }
  const Scalar& operator[](std::size_t i) const { return values_[i]; }
  std::span<Scalar> values() noexcept { return values_; }
  std::span<const Scalar> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  static int checked(int dim) {
    check_dim(dim);
    return dim;
  }

  int dim_;
  std::vector<Scalar> values_;
};

template <class Scalar>
using Function = Table<Scalar, FunctionTag>;
template <class Scalar>
using Spectrum = Table<Scalar, SpectrumTag>;

using IntFunction = Function<BigInt>;
using SpectrumTable = Spectrum<BigInt>;

/// Unnormalized in-place butterfly: v[r] <- sum_x v[x] (-1)^<r,x>.
/// Each level splits the N/2 butterflies across threads; the arithmetic per
/// entry is the same for any thread count, so results are identical.
template <class Scalar>
void fwht_inplace(std::span<Scalar> v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0) throw DimensionError("fwht: length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    parallel_chunks(0, n / 2, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t j = (i / h) * 2 * h + (i % h);
        Scalar a = v[j];
        Scalar b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }, 4096);
  }
}

template <class Scalar>
Spectrum<Scalar> wht(const Function<Scalar>& f) {
  std::vector<Scalar> v(f.begin(), f.end());
  fwht_inplace<Scalar>(v);
  return Spectrum<Scalar>(f.dim(), std::move(v));
}

/// Definition-based O(N^2) transform; reference implementation for tests.
template <class Scalar>
Spectrum<Scalar> wht_naive(const Function<Scalar>& f) {
  Spectrum<Scalar> out(f.dim());
  for (std::size_t r = 0; r < f.size(); ++r) {
    Scalar acc{};
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (dot(static_cast<Word>(r), static_cast<Word>(x)) != 0) {
        acc -= f[x];
      } else {
        acc += f[x];
      }
    }
    out[r] = acc;
  }
  return out;
}

/// Raised when an inverse transform would leave the integers.
class NonIntegralInverse : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inverse of wht: f = N^{-1} * wht(S). Throws NonIntegralInverse when some
/// entry of wht(S) is not divisible by N.
IntFunction inverse_wht(const SpectrumTable& s);

IntFunction indicator(const Set& a);
/// Machine-word spectrum of a set; exact since |A^(r)| <= 2^30.
Spectrum<std::int64_t> spectrum_words(const Set& a);
SpectrumTable spectrum_of_set(const Set& a);

/// { r : |A^(r)| >= alpha N } for rational alpha in (0, 1].
Set large_spectrum(const Set& a, const Rational& alpha);
/// Same test on a precomputed spectrum.
Set large_spectrum(const Spectrum<std::int64_t>& s, const Rational& alpha);

/// CSV dump with header "r,coefficient"; r rendered as a bitstring.
void write_spectrum_csv(std::ostream& out, const SpectrumTable& s);

}  // namespace f2ac
