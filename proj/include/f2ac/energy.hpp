#pragma once

// Additive energies T_k of sets and integer functions, convolution, and the
// exact inequality checks built on them.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "f2ac/f2n.hpp"
#include "f2ac/numeric.hpp"
#include "f2ac/wht.hpp"

namespace f2ac {

using EnergyValue = BigInt;

enum class EnergyMethod { kBrute, kSpectral, kConvolution };
std::string_view to_string(EnergyMethod m);

struct EnergyReport {
  EnergyValue value;
  EnergyMethod method = EnergyMethod::kSpectral;
  int k = 2;
  std::vector<std::size_t> sizes;
  double seconds = 0.0;
};

/// Cap on |A|^k for the enumerating energy.
inline constexpr std::uint64_t kBruteBudget = 100'000'000;

/// T_k(A) by counting k-fold sums r(x) and returning sum_x r(x)^2.
/// Throws BudgetExceeded when |A|^k > budget.
EnergyValue energy_bruteforce(const Set& a, int k, std::uint64_t budget = kBruteBudget);

/// T_k(A) = N^{-1} sum_r A^(r)^{2k}. Aborts (std::logic_error) if the sum is
/// not divisible by N, which would mean a transform bug.
EnergyValue energy_spectral(const Set& a, int k);
EnergyValue energy_spectral(const Spectrum<std::int64_t>& s, int k);

/// T_k(A) as energy_function of the indicator (iterated sparse convolution).
EnergyValue energy_convolution(const Set& a, int k);

/// Number of solutions of a_1 + ... + a_k = a_{k+1} + ... + a_{2k} with
/// a_i in A_i; needs an even, nonzero number of sets.
EnergyValue energy_multiset(std::span<const Set> sets);

/// Energies of subsets of one fixed ground set. Elements are mapped once onto
/// the pivot coordinates of span(ground), which is injective and linear there,
/// and T_k is then counted in the compressed space. Not thread-safe (scratch).
class SubsetEnergy {
 public:
  SubsetEnergy(const Set& ground, int k);

  int k() const noexcept { return k_; }
  int rank() const noexcept { return rank_; }
  std::size_t ground_size() const noexcept { return compressed_.size(); }
  Word compressed(std::size_t i) const { return compressed_[i]; }

  /// T_k of the ground elements at the given positions.
  BigInt operator()(std::span<const std::size_t> positions) const;
  /// T_k of the ground elements selected by bit i of mask (ground size <= 64).
  BigInt of_mask(std::uint64_t mask) const;
  /// T_k of arbitrary compressed words.
  BigInt of_compressed(std::span<const Word> words) const;

 private:
  int k_;
  int rank_ = 0;
  std::vector<Word> compressed_;
  mutable std::vector<std::uint64_t> cur_;
  mutable std::vector<std::uint64_t> next_;
  mutable std::vector<Word> support_;
  mutable std::vector<Word> next_support_;
  mutable std::vector<Word> scratch_;
};

/// T_k(A) through SubsetEnergy on the whole set.
EnergyValue energy_compressed(const Set& a, int k);

/// Evaluates all methods that fit their budgets.
std::vector<EnergyReport> energy_all(const Set& a, int k, std::uint64_t budget = kBruteBudget);

/// (f * g)(x) = sum_s f(s) g(x - s), via transform, multiply, invert.
IntFunction convolve(const IntFunction& f, const IntFunction& g);
/// The same by direct summation over the supports.
IntFunction convolve_direct(const IntFunction& f, const IntFunction& g);
/// f * f * ... * f with k factors.
IntFunction convolve_power(const IntFunction& f, int k);

/// T_k(f) = sum_x |(f *_{k-1} f)(x)|^2 for k >= 1, by iterated convolution.
EnergyValue energy_function(const IntFunction& f, int k);
/// N^{-1} sum_r f^(r)^{2k}; agrees with energy_function for integer f.
EnergyValue energy_function_spectral(const IntFunction& f, int k);

/// Lower bound from solutions whose right side permutes k distinct left
/// entries: C(m, k) (k!)^2.
BigInt diagonal_lower_bound(std::size_t m, int k);

struct HolderReport {
  int s = 0;
  int t = 0;
  BigInt lhs;        // |sum_x (f_1*...*f_s)(x) (g_1*...*g_t)(x)|
  BigInt lhs_power;  // lhs^{2st}
  BigInt rhs_power;  // prod T_s(f_i)^t prod T_t(g_j)^s
  bool holds = false;
  double slack = 0.0;  // rhs / lhs, +inf when lhs = 0
};

/// Multiple-function Holder bound for energies, compared after raising both
/// sides to the power 2st.
HolderReport holder_check(std::span<const IntFunction> fs, std::span<const IntFunction> gs);

struct SubadditivityReport {
  int k = 2;
  BigInt union_energy;
  BigInt energy_a;
  BigInt energy_b;
  bool holds = false;
  double slack = 0.0;  // (T(A)^{1/2k} + T(B)^{1/2k}) / T(A u B)^{1/2k}
};

/// T_k(A u B)^{1/2k} <= T_k(A)^{1/2k} + T_k(B)^{1/2k}, decided exactly.
SubadditivityReport subadditivity_check(const Set& a, const Set& b, int k);

struct DkZeta {
  double dk = 0.0;
  double zeta = 0.0;
};

/// D_k = log2 T_k - k log2 k - k log2 |A| and zeta_k = log2 T_k / log2 |A|.
DkZeta dk_zeta(const BigInt& energy, std::size_t size, int k);
DkZeta dk_zeta(const Set& a, int k);

}  // namespace f2ac
