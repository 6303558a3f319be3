#include "f2ac/energy.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "f2ac/parallel.hpp"

namespace f2ac {

std::string_view to_string(EnergyMethod m) {
  switch (m) {
    case EnergyMethod::kBrute:
      return "brute";
    case EnergyMethod::kSpectral:
      return "spectral";
    case EnergyMethod::kConvolution:
      return "conv";
  }
  return "spectral";
}

namespace {

void check_k(int k) {
  if (k < 1) throw PreconditionError("energy order k must be positive");
}

// Adds, for every k-tuple whose first entry has index in [lo, hi), one to the
// count of its sum.
template <class Counts>
void count_tuples(const Set& a, int k, std::size_t lo, std::size_t hi, Counts& counts) {
  auto rec = [&](auto&& self, int depth, Word sum) -> void {
    if (depth == k) {
      ++counts[sum];
      return;
    }
    for (Word w : a) self(self, depth + 1, sum ^ w);
  };
  for (std::size_t i = lo; i < hi; ++i) rec(rec, 1, a[i]);
}

}  // namespace

EnergyValue energy_bruteforce(const Set& a, int k, std::uint64_t budget) {
  check_k(k);
  if (a.empty()) return 0;
  if (ipow(BigInt(a.size()), static_cast<unsigned>(k)) > budget) {
    throw BudgetExceeded("energy_bruteforce: |A|^k exceeds the enumeration budget");
  }
  if (a.dim() <= 22) {
    const std::size_t chunks = chunk_count(a.size(), 1);
    std::vector<std::vector<std::uint64_t>> tables(std::max<std::size_t>(chunks, 1));
    const std::size_t step = (a.size() + tables.size() - 1) / tables.size();
    parallel_chunks(0, tables.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t c = lo; c < hi; ++c) {
        tables[c].assign(std::size_t{1} << a.dim(), 0);
        count_tuples(a, k, c * step, std::min(a.size(), (c + 1) * step), tables[c]);
      }
    }, 1);
    std::uint64_t total = 0;
    for (std::size_t x = 0; x < tables[0].size(); ++x) {
      std::uint64_t c = 0;
      for (const auto& t : tables) c += t[x];
      total += c * c;
    }
    return total;
  }
  std::unordered_map<Word, std::uint64_t> counts;
  count_tuples(a, k, 0, a.size(), counts);
  std::uint64_t total = 0;
  for (const auto& [sum, c] : counts) total += c * c;
  return total;
}

namespace {

Word extract_bits(Word x, Word mask) {
  Word out = 0;
  int pos = 0;
  for (Word m = mask; m != 0; m &= m - 1, ++pos) {
    if ((x & (m & (~m + 1))) != 0) out |= Word{1} << pos;
  }
  return out;
}

int bit_length(std::uint64_t x) { return x == 0 ? 0 : 64 - __builtin_clzll(x); }

}  // namespace

SubsetEnergy::SubsetEnergy(const Set& ground, int k) : k_(k) {
  check_k(k);
  std::array<Word, 32> pivot{};
  Word mask = 0;
  for (Word w : ground) {
    for (int b = 31; b >= 0 && w != 0; --b) {
      if (((w >> b) & 1U) != 0 && pivot[static_cast<std::size_t>(b)] != 0) w ^= pivot[static_cast<std::size_t>(b)];
    }
    if (w == 0) continue;
    const int top = 31 - __builtin_clz(w);
    pivot[static_cast<std::size_t>(top)] = w;
    mask |= Word{1} << top;
    ++rank_;
  }
  compressed_.reserve(ground.size());
  for (Word w : ground) compressed_.push_back(extract_bits(w, mask));
}

BigInt SubsetEnergy::operator()(std::span<const std::size_t> positions) const {
  scratch_.clear();
  for (std::size_t i : positions) scratch_.push_back(compressed_.at(i));
  return of_compressed(scratch_);
}

BigInt SubsetEnergy::of_mask(std::uint64_t mask) const {
  if (compressed_.size() > 64) throw PreconditionError("SubsetEnergy::of_mask needs at most 64 ground elements");
  scratch_.clear();
  for (; mask != 0; mask &= mask - 1) scratch_.push_back(compressed_[static_cast<std::size_t>(__builtin_ctzll(mask))]);
  return of_compressed(scratch_);
}

BigInt SubsetEnergy::of_compressed(std::span<const Word> words) const {
  const std::uint64_t m = words.size();
  if (m == 0) return 0;
  if (k_ == 1) return m;
  const int bits = bit_length(m);
  if ((k_ - 1) * bits >= 63) throw BudgetExceeded("SubsetEnergy: tuple counts would overflow 64 bits");
  const bool wide = (2 * k_ - 1) * bits >= 126;

  if (rank_ > 20) {
    std::unordered_map<Word, std::uint64_t> cur;
    for (Word w : words) cur[w] += 1;
    for (int step = 1; step < k_; ++step) {
      std::unordered_map<Word, std::uint64_t> next;
      for (const auto& [x, c] : cur) {
        for (Word w : words) next[x ^ w] += c;
      }
      cur.swap(next);
    }
    BigInt total = 0;
    for (const auto& [x, c] : cur) total += BigInt(c) * c;
    return total;
  }

  const std::size_t size = std::size_t{1} << rank_;
  if (cur_.size() != size) {
    cur_.assign(size, 0);
    next_.assign(size, 0);
  }
  support_.clear();
  for (Word w : words) {
    if (cur_[w]++ == 0) support_.push_back(w);
  }
  for (int step = 1; step < k_; ++step) {
    next_support_.clear();
    for (Word x : support_) {
      const std::uint64_t c = cur_[x];
      for (Word w : words) {
        const Word y = x ^ w;
        if (next_[y] == 0) next_support_.push_back(y);
        next_[y] += c;
      }
      cur_[x] = 0;
    }
    cur_.swap(next_);
    support_.swap(next_support_);
  }
  BigInt big = 0;
  unsigned __int128 total = 0;
  for (Word x : support_) {
    const std::uint64_t c = cur_[x];
    cur_[x] = 0;
    if (wide) {
      big += BigInt(c) * c;
    } else {
      total += static_cast<unsigned __int128>(c) * c;
    }
  }
  if (wide) return big;
  const auto hi = static_cast<std::uint64_t>(total >> 64);
  const auto lo = static_cast<std::uint64_t>(total);
  return hi == 0 ? BigInt(lo) : (BigInt(hi) << 64) + lo;
}

EnergyValue energy_compressed(const Set& a, int k) {
  const SubsetEnergy kernel(a, k);
  std::vector<Word> all;
  for (std::size_t i = 0; i < a.size(); ++i) all.push_back(kernel.compressed(i));
  return kernel.of_compressed(all);
}

EnergyValue energy_spectral(const Spectrum<std::int64_t>& s, int k) {
  check_k(k);
  BigInt total = 0;
  for (std::int64_t c : s) {
    if (c == 0) continue;
    total += ipow(BigInt(static_cast<std::int64_t>(c) * c), static_cast<unsigned>(k));
  }
  const BigInt n = BigInt(1) << s.dim();
  if (total % n != 0) throw std::logic_error("energy_spectral: sum of 2k-th powers not divisible by N");
  return total / n;
}

EnergyValue energy_spectral(const Set& a, int k) { return energy_spectral(spectrum_words(a), k); }

EnergyValue energy_convolution(const Set& a, int k) { return energy_function(indicator(a), k); }

EnergyValue energy_multiset(std::span<const Set> sets) {
  if (sets.empty() || sets.size() % 2 != 0) throw PreconditionError("energy_multiset needs 2k sets");
  const int dim = sets.front().dim();
  std::vector<Spectrum<std::int64_t>> spectra;
  spectra.reserve(sets.size());
  for (const Set& s : sets) {
    if (s.dim() != dim) throw DimensionError("energy_multiset: dimension mismatch");
    if (s.empty()) return 0;
    spectra.push_back(spectrum_words(s));
  }
  BigInt total = 0;
  const std::size_t n = std::size_t{1} << dim;
  for (std::size_t r = 0; r < n; ++r) {
    BigInt prod = 1;
    for (const auto& sp : spectra) {
      if (sp[r] == 0) {
        prod = 0;
        break;
      }
      prod *= sp[r];
    }
    total += prod;
  }
  if (total % n != 0) throw std::logic_error("energy_multiset: character sum not divisible by N");
  return total / n;
}

std::vector<EnergyReport> energy_all(const Set& a, int k, std::uint64_t budget) {
  std::vector<EnergyReport> out;
  const std::vector<std::size_t> sizes{a.size()};
  auto timed = [&](EnergyMethod m, auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    EnergyReport r;
    r.value = fn();
    r.method = m;
    r.k = k;
    r.sizes = sizes;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  };
  if (ipow(BigInt(a.size()), static_cast<unsigned>(k)) <= budget) {
    timed(EnergyMethod::kBrute, [&] { return energy_bruteforce(a, k, budget); });
  }
  timed(EnergyMethod::kSpectral, [&] { return energy_spectral(a, k); });
  if (a.dim() <= 20) timed(EnergyMethod::kConvolution, [&] { return energy_convolution(a, k); });
  return out;
}

IntFunction convolve(const IntFunction& f, const IntFunction& g) {
  if (f.dim() != g.dim()) throw DimensionError("convolve: dimension mismatch");
  const SpectrumTable sf = wht(f);
  const SpectrumTable sg = wht(g);
  SpectrumTable prod(f.dim());
  for (std::size_t r = 0; r < prod.size(); ++r) prod[r] = sf[r] * sg[r];
  return inverse_wht(prod);
}

namespace {

struct Sparse {
  std::vector<Word> at;
  std::vector<BigInt> value;
};

Sparse support(const IntFunction& f) {
  Sparse s;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x] != 0) {
      s.at.push_back(static_cast<Word>(x));
      s.value.push_back(f[x]);
    }
  }
  return s;
}

template <class Scalar>
std::vector<Scalar> convolve_sparse(const std::vector<Scalar>& g, const std::vector<Word>& at,
                                    const std::vector<Scalar>& value) {
  std::vector<Scalar> out(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (g[x] == 0) continue;
    for (std::size_t i = 0; i < at.size(); ++i) out[x ^ at[i]] += g[x] * value[i];
  }
  return out;
}

// Iterated convolution; machine words when every partial sum is bounded by
// (sum |f|)^k < 2^62.
template <class Scalar>
std::vector<Scalar> power_table(const IntFunction& f, int k) {
  const Sparse s = support(f);
  std::vector<Scalar> value;
  for (const BigInt& v : s.value) value.push_back(v.convert_to<Scalar>());
  std::vector<Scalar> g(f.size());
  for (std::size_t i = 0; i < s.at.size(); ++i) g[s.at[i]] = value[i];
  for (int j = 1; j < k; ++j) g = convolve_sparse(g, s.at, value);
  return g;
}

bool fits_words(const IntFunction& f, int k) {
  BigInt l1 = 0;
  for (const BigInt& v : f) l1 += abs(v);
  return ipow(l1, static_cast<unsigned>(k)) < (BigInt(1) << 62);
}

}  // namespace

IntFunction convolve_direct(const IntFunction& f, const IntFunction& g) {
  if (f.dim() != g.dim()) throw DimensionError("convolve_direct: dimension mismatch");
  const Sparse s = support(g);
  std::vector<BigInt> table(f.begin(), f.end());
  return IntFunction(f.dim(), convolve_sparse(table, s.at, s.value));
}

IntFunction convolve_power(const IntFunction& f, int k) {
  check_k(k);
  if (fits_words(f, k)) {
    const std::vector<std::int64_t> g = power_table<std::int64_t>(f, k);
    return IntFunction(f.dim(), std::vector<BigInt>(g.begin(), g.end()));
  }
  return IntFunction(f.dim(), power_table<BigInt>(f, k));
}

EnergyValue energy_function(const IntFunction& f, int k) {
  check_k(k);
  if (fits_words(f, k)) {
    const std::vector<std::int64_t> g = power_table<std::int64_t>(f, k);
    // Each |g(x)| < 2^62 and sum |g| < 2^62, so the sum of squares fits 124 bits.
    unsigned __int128 total = 0;
    for (std::int64_t v : g) total += static_cast<unsigned __int128>(static_cast<__int128>(v) * v);
    BigInt out = static_cast<std::uint64_t>(total >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(total);
    return out;
  }
  const std::vector<BigInt> g = power_table<BigInt>(f, k);
  BigInt total = 0;
  for (const BigInt& v : g) total += v * v;
  return total;
}

EnergyValue energy_function_spectral(const IntFunction& f, int k) {
  check_k(k);
  const SpectrumTable s = wht(f);
  BigInt total = 0;
  for (const BigInt& c : s) total += ipow(BigInt(c * c), static_cast<unsigned>(k));
  const BigInt n = BigInt(1) << f.dim();
  if (total % n != 0) throw std::logic_error("energy_function_spectral: sum not divisible by N");
  return total / n;
}

BigInt diagonal_lower_bound(std::size_t m, int k) {
  const BigInt kf = factorial(static_cast<unsigned>(k));
  return binomial(static_cast<unsigned>(m), static_cast<unsigned>(k)) * kf * kf;
}

namespace {

double ratio_log2(const BigInt& num, const BigInt& den) {
  if (den == 0) return std::numeric_limits<double>::infinity();
  if (num == 0) return -std::numeric_limits<double>::infinity();
  return log2_approx(num) - log2_approx(den);
}

}  // namespace

HolderReport holder_check(std::span<const IntFunction> fs, std::span<const IntFunction> gs) {
  if (fs.size() < 2 || gs.size() < 2) throw PreconditionError("holder_check needs s, t >= 2");
  const int dim = fs.front().dim();
  for (const auto& f : fs) {
    if (f.dim() != dim) throw DimensionError("holder_check: dimension mismatch");
  }
  for (const auto& g : gs) {
    if (g.dim() != dim) throw DimensionError("holder_check: dimension mismatch");
  }
  HolderReport rep;
  rep.s = static_cast<int>(fs.size());
  rep.t = static_cast<int>(gs.size());

  // Left side by direct convolution.
  IntFunction left = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) left = convolve_direct(left, fs[i]);
  IntFunction right = gs[0];
  for (std::size_t j = 1; j < gs.size(); ++j) right = convolve_direct(right, gs[j]);
  BigInt inner = 0;
  for (std::size_t x = 0; x < left.size(); ++x) inner += left[x] * right[x];
  rep.lhs = abs(inner);

  const auto s = static_cast<unsigned>(rep.s);
  const auto t = static_cast<unsigned>(rep.t);
  rep.lhs_power = ipow(rep.lhs, 2 * s * t);
  rep.rhs_power = 1;
  for (const auto& f : fs) rep.rhs_power *= ipow(energy_function(f, rep.s), t);
  for (const auto& g : gs) rep.rhs_power *= ipow(energy_function(g, rep.t), s);
  rep.holds = rep.lhs_power <= rep.rhs_power;
  rep.slack = std::exp2(ratio_log2(rep.rhs_power, rep.lhs_power) / (2.0 * s * t));
  return rep;
}

SubadditivityReport subadditivity_check(const Set& a, const Set& b, int k) {
  if (a.dim() != b.dim()) throw DimensionError("subadditivity_check: dimension mismatch");
  check_k(k);
  SubadditivityReport rep;
  rep.k = k;
  const Set u = set_union(a, b);
  rep.union_energy = energy_spectral(u, k);
  rep.energy_a = energy_spectral(a, k);
  rep.energy_b = energy_spectral(b, k);
  rep.holds = root_sum_leq(rep.union_energy, rep.energy_a, rep.energy_b, static_cast<unsigned>(2 * k));
  const double m = 2.0 * k;
  const double ra = rep.energy_a == 0 ? 0.0 : std::exp2(log2_approx(rep.energy_a) / m);
  const double rb = rep.energy_b == 0 ? 0.0 : std::exp2(log2_approx(rep.energy_b) / m);
  const double ru = rep.union_energy == 0 ? 0.0 : std::exp2(log2_approx(rep.union_energy) / m);
  rep.slack = ru == 0.0 ? std::numeric_limits<double>::infinity() : (ra + rb) / ru;
  return rep;
}

DkZeta dk_zeta(const BigInt& energy, std::size_t size, int k) {
  if (size < 2) throw PreconditionError("dk_zeta needs |A| >= 2");
  const double lt = log2_approx(energy);
  const double la = std::log2(static_cast<double>(size));
  return {lt - k * std::log2(static_cast<double>(k)) - k * la, lt / la};
}

DkZeta dk_zeta(const Set& a, int k) { return dk_zeta(energy_spectral(a, k), a.size(), k); }

}  // namespace f2ac
