#include <gtest/gtest.h>

#include <cmath>

#include "f2ac/dissociation.hpp"
#include "f2ac/energy.hpp"
#include "oracles.hpp"

using namespace f2ac;

TEST(Energy, KnownValues) {
  EXPECT_EQ(energy_bruteforce(Set(4, {5}), 3), 1);
  EXPECT_EQ(energy_bruteforce(Set(4, {1, 2, 4}), 2), 21);
  EXPECT_EQ(energy_spectral(Set(4, {1, 2, 4}), 2), 21);
  EXPECT_EQ(energy_bruteforce(Set(4, {0, 3}), 2), 8);
  EXPECT_EQ(energy_bruteforce(Set(5, {1, 2, 4, 8}), 2), 40);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 1; k <= 3; ++k) {
      EXPECT_EQ(energy_spectral(Set::full(n), k), ipow(BigInt(1) << n, static_cast<unsigned>(2 * k - 1)));
    }
  }
}

TEST(Energy, BasisFormula) {
  for (unsigned m = 1; m <= 8; ++m) {
    std::vector<Word> basis;
    for (unsigned i = 0; i < m; ++i) basis.push_back(Word{1} << i);
    EXPECT_EQ(energy_spectral(Set(8, basis), 2), 3 * m * m - 2 * m);
  }
}

TEST(Energy, MethodsAgreeWithNaiveOracle) {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(oracle::below(rng, 7));
    const int k = 1 + static_cast<int>(oracle::below(rng, 3));
    const Set a = oracle::random_set(rng, n, 1 + oracle::below(rng, 7));
    const BigInt expected = oracle::naive_energy(a, k);
    ASSERT_EQ(energy_bruteforce(a, k), expected);
    ASSERT_EQ(energy_spectral(a, k), expected);
    ASSERT_EQ(energy_convolution(a, k), expected);
  }
}

TEST(Energy, BudgetAndLargeDimension) {
  EXPECT_THROW(energy_bruteforce(Set::full(8), 4, 1000), BudgetExceeded);
  // Map-based path above dimension 22.
  Rng rng(3);
  const Set l = random_dissociated(24, 10, 4);
  EXPECT_EQ(energy_bruteforce(l, 2), 3 * 100 - 20);
}

TEST(Energy, MonotoneAndDiagonal) {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(oracle::below(rng, 6));
    const int k = 1 + static_cast<int>(oracle::below(rng, 3));
    const Set b = oracle::random_set(rng, n, 1 + oracle::below(rng, 20));
    const Set a = oracle::random_subset(rng, b, 1, 2);
    const BigInt tb = energy_spectral(b, k);
    ASSERT_LE(energy_spectral(a, k), tb);
    ASSERT_GE(tb, ipow(BigInt(b.size()), static_cast<unsigned>(k)));
    ASSERT_GE(tb, diagonal_lower_bound(b.size(), k));
  }
}

TEST(Energy, Multiset) {
  Rng rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(oracle::below(rng, 5));
    const std::size_t k = 1 + oracle::below(rng, 2);
    std::vector<Set> sets;
    for (std::size_t i = 0; i < 2 * k; ++i) sets.push_back(oracle::random_set(rng, n, 1 + oracle::below(rng, 6)));
    ASSERT_EQ(energy_multiset(sets), oracle::naive_energy_multi(sets));
    const std::vector<Set> same(2 * k, sets.front());
    ASSERT_EQ(energy_multiset(same), energy_spectral(sets.front(), static_cast<int>(k)));
  }
  const std::vector<Set> singletons{Set(3, {1}), Set(3, {2}), Set(3, {4}), Set(3, {1})};
  EXPECT_EQ(energy_multiset(singletons), 0);
  EXPECT_THROW(energy_multiset(std::vector<Set>(3, Set(3, {1}))), PreconditionError);
}

TEST(Convolution, Basics) {
  Rng rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(oracle::below(rng, 6));
    const IntFunction f = oracle::random_function(rng, n, -9, 9);
    const IntFunction g = oracle::random_function(rng, n, -9, 9);
    const IntFunction fg = convolve(f, g);
    ASSERT_EQ(fg, convolve_direct(f, g));
    ASSERT_EQ(fg, convolve(g, f));
    const auto expected = oracle::naive_convolve({f.begin(), f.end()}, {g.begin(), g.end()});
    ASSERT_EQ(std::vector<BigInt>(fg.begin(), fg.end()), expected);
    ASSERT_EQ(convolve(indicator(Set(n, {0})), f), f);
  }
}

TEST(Convolution, SupportIsSumset) {
  Rng rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(oracle::below(rng, 5));
    const Set a = oracle::random_set(rng, n, 1 + oracle::below(rng, 6));
    const Set b = oracle::random_set(rng, n, 1 + oracle::below(rng, 6));
    const IntFunction ab = convolve(indicator(a), indicator(b));
    const Set sum = sumset(a, b);
    for (std::size_t x = 0; x < ab.size(); ++x) ASSERT_EQ(ab[x] != 0, sum.contains(static_cast<Word>(x)));
  }
}

TEST(EnergyFunction, Values) {
  IntFunction f(3);
  f[0] = 2;
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(energy_function(f, k), BigInt(1) << (2 * k));
  Rng rng(127);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(oracle::below(rng, 6));
    const int k = 1 + static_cast<int>(oracle::below(rng, 3));
    const IntFunction g = oracle::random_function(rng, n, -20, 20);
    ASSERT_EQ(energy_function(g, k), energy_function_spectral(g, k));
    IntFunction absg = g;
    for (std::size_t x = 0; x < absg.size(); ++x) absg[x] = abs(absg[x]);
    ASSERT_LE(energy_function(g, k), energy_function(absg, k));
  }
}

TEST(EnergyFunction, BigIntegerPath) {
  IntFunction f(2);
  f[1] = BigInt(1) << 40;
  f[2] = 3;
  EXPECT_EQ(energy_function(f, 3), energy_function_spectral(f, 3));
  EXPECT_EQ(convolve_power(f, 2), convolve(f, f));
}

TEST(Holder, EqualityAndRandom) {
  const IntFunction a = indicator(Set(4, {1, 2, 4, 7, 9}));
  const std::vector<IntFunction> two{a, a};
  const HolderReport eq = holder_check(two, two);
  EXPECT_EQ(eq.lhs, energy_spectral(Set(4, {1, 2, 4, 7, 9}), 2));
  EXPECT_TRUE(eq.holds);
  EXPECT_EQ(eq.lhs_power, eq.rhs_power);

  Rng rng(131);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(oracle::below(rng, 5));
    const std::size_t s = 2 + oracle::below(rng, 2);
    const std::size_t t = 2 + oracle::below(rng, 2);
    std::vector<IntFunction> fs;
    std::vector<IntFunction> gs;
    for (std::size_t i = 0; i < s; ++i) fs.push_back(oracle::random_function(rng, n, 0, 1));
    for (std::size_t j = 0; j < t; ++j) gs.push_back(oracle::random_function(rng, n, 0, 1));
    ASSERT_TRUE(holder_check(fs, gs).holds);
  }
  const std::vector<IntFunction> zero{IntFunction(4), a};
  const std::vector<IntFunction> other{a, a};
  const HolderReport z = holder_check(zero, other);
  EXPECT_EQ(z.lhs, 0);
  EXPECT_TRUE(z.holds);
  EXPECT_THROW(holder_check(std::vector<IntFunction>{a}, two), PreconditionError);
}

TEST(Subadditivity, Cases) {
  const Set a(4, {1, 2, 4, 7});
  const SubadditivityReport empty = subadditivity_check(a, Set(4), 2);
  EXPECT_TRUE(empty.holds);
  EXPECT_EQ(empty.union_energy, empty.energy_a);

  const SubadditivityReport pair = subadditivity_check(Set(4, {1}), Set(4, {2}), 2);
  EXPECT_EQ(pair.union_energy, 8);
  EXPECT_TRUE(pair.holds);

  Rng rng(137);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(oracle::below(rng, 6));
    const int k = 1 + static_cast<int>(oracle::below(rng, 3));
    const Set x = oracle::random_set(rng, n, 1 + oracle::below(rng, 10));
    const Set y = set_difference(oracle::random_set(rng, n, 1 + oracle::below(rng, 10)), x);
    ASSERT_TRUE(subadditivity_check(x, y, k).holds);
  }
}

TEST(DkZeta, Values) {
  const DkZeta sub = dk_zeta(oracle::coordinate_subspace(6, 2), 2);
  EXPECT_DOUBLE_EQ(sub.zeta, 3.0);
  const DkZeta basis = dk_zeta(Set(4, {1, 2, 4, 8}), 2);
  EXPECT_NEAR(basis.dk, std::log2(40.0) - 6.0, 1e-12);
  EXPECT_THROW(dk_zeta(Set(3, {1}), 2), PreconditionError);
}

TEST(SubsetEnergy, MatchesBruteForce) {
  Rng rng(139);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(oracle::below(rng, 9));
    const int k = 1 + static_cast<int>(oracle::below(rng, 4));
    const Set a = oracle::random_set(rng, n, 1 + oracle::below(rng, 12));
    ASSERT_EQ(energy_compressed(a, k), energy_bruteforce(a, k));
    const SubsetEnergy kernel(a, k);
    ASSERT_EQ(kernel.rank(), gf2_rank(a.words()));
    const Set sub = oracle::random_subset(rng, a, 1, 2);
    std::uint64_t mask = 0;
    for (Word w : sub) mask |= std::uint64_t{1} << a.index_of(w);
    ASSERT_EQ(kernel.of_mask(mask), energy_bruteforce(sub, k));
  }
  // Rank above the dense threshold.
  const Set wide = random_dissociated(26, 22, 9);
  EXPECT_EQ(energy_compressed(wide, 2), 3 * 22 * 22 - 2 * 22);
}
