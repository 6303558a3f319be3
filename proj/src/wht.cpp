#include "f2ac/wht.hpp"

#include <cstdlib>
#include <ostream>

namespace f2ac {

IntFunction inverse_wht(const SpectrumTable& s) {
  std::vector<BigInt> v(s.begin(), s.end());
  fwht_inplace<BigInt>(v);
  const BigInt n = BigInt(1) << s.dim();
  for (std::size_t x = 0; x < v.size(); ++x) {
    BigInt q;
    BigInt r;
    boost::multiprecision::divide_qr(v[x], n, q, r);
    if (r != 0) {
      throw NonIntegralInverse("inverse transform is not integral at " + to_bitstring(static_cast<Word>(x), s.dim()));
    }
    v[x] = std::move(q);
  }
  return IntFunction(s.dim(), std::move(v));
}

IntFunction indicator(const Set& a) {
  IntFunction f(a.dim());
  for (Word w : a) f[w] = 1;
  return f;
}

Spectrum<std::int64_t> spectrum_words(const Set& a) {
  Function<std::int64_t> f(a.dim());
  for (Word w : a) f[w] = 1;
  return wht(f);
}

SpectrumTable spectrum_of_set(const Set& a) {
  const Spectrum<std::int64_t> s = spectrum_words(a);
  std::vector<BigInt> v(s.begin(), s.end());
  return SpectrumTable(a.dim(), std::move(v));
}

Set large_spectrum(const Spectrum<std::int64_t>& s, const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) throw std::invalid_argument("alpha must lie in (0, 1]");
  // |c| >= alpha N  <=>  |c| >= ceil(alpha N) for integer c.
  const BigInt threshold = ceil(alpha * Rational(BigInt(1) << s.dim()));
  const auto t = threshold.convert_to<std::int64_t>();
  std::vector<Word> out;
  for (std::size_t r = 0; r < s.size(); ++r) {
    if (std::llabs(s[r]) >= t) out.push_back(static_cast<Word>(r));
  }
  return Set(s.dim(), std::move(out));
}

Set large_spectrum(const Set& a, const Rational& alpha) {
  if (a.empty()) throw std::invalid_argument("large_spectrum: empty set");
  return large_spectrum(spectrum_words(a), alpha);
}

void write_spectrum_csv(std::ostream& out, const SpectrumTable& s) {
  out << "r,coefficient\n";
  for (std::size_t r = 0; r < s.size(); ++r) {
    out << to_bitstring(static_cast<Word>(r), s.dim()) << ',' << s[r] << '\n';
  }
}

}  // namespace f2ac
