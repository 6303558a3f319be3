#include <gtest/gtest.h>

#include <sstream>

#include "f2ac/dissociation.hpp"
#include "f2ac/f2n.hpp"
#include "oracles.hpp"

using namespace f2ac;

namespace {

Word bits(std::string_view s) { return parse_bitstring(s, static_cast<int>(s.size())); }

}  // namespace

TEST(Element, AddIsXor) {
  const Element x(bits("1010"), 4);
  const Element y(bits("0110"), 4);
  EXPECT_EQ(to_bitstring(x + y), "1100");
  EXPECT_EQ((x + x).bits(), 0U);
  EXPECT_EQ(x + Element::zero(4), x);
}

TEST(Element, DimensionMismatchThrows) {
  EXPECT_THROW(add(Element(1, 3), Element(1, 4)), DimensionError);
  EXPECT_THROW(dot(Element(1, 3), Element(1, 4)), DimensionError);
  EXPECT_THROW(Element(8, 3), DimensionError);
  EXPECT_THROW(Element(0, 31), DimensionError);
}

TEST(Element, Dot) {
  EXPECT_EQ(dot(Element(bits("1100"), 4), Element(bits("1000"), 4)), 1);
  EXPECT_EQ(dot(Element(bits("1011"), 4), Element::zero(4)), 0);
  EXPECT_EQ(dot(Element(bits("1111"), 4), Element(bits("1111"), 4)), 0);
}

TEST(Element, GroupLawExhaustive) {
  const int n = 6;
  for (Word a = 0; a < 64; ++a) {
    for (Word b = 0; b < 64; ++b) {
      const Element x(a, n);
      const Element y(b, n);
      ASSERT_EQ(x + y, y + x);
      ASSERT_EQ((x + y) + y, x);
      for (Word c = 0; c < 64; c += 7) {
        const Element z(c, n);
        ASSERT_EQ((x + y) + z, x + (y + z));
      }
    }
  }
}

TEST(Element, UnitVectorIsLeftmostCoordinate) {
  EXPECT_EQ(to_bitstring(Element::unit(4, 1)), "1000");
  EXPECT_EQ(to_bitstring(Element::unit(4, 4)), "0001");
  EXPECT_THROW(Element::unit(4, 5), std::out_of_range);
}

TEST(Set, SortsAndMerges) {
  const Set s(3, {5, 1, 5, 2});
  EXPECT_EQ(s.size(), 3U);
  EXPECT_EQ(s[0], 1U);
  EXPECT_TRUE(s.contains(Word{5}));
  EXPECT_FALSE(s.contains(Word{4}));
  EXPECT_EQ(s.index_of(5), 2);
  EXPECT_EQ(s.index_of(4), -1);
  EXPECT_THROW(Set(2, {4}), DimensionError);
}

TEST(Set, Operations) {
  const Set a(3, {0, 1, 2});
  const Set b(3, {2, 3});
  EXPECT_EQ(set_union(a, b), Set(3, {0, 1, 2, 3}));
  EXPECT_EQ(set_intersection(a, b), Set(3, {2}));
  EXPECT_EQ(set_difference(a, b), Set(3, {0, 1}));
  EXPECT_EQ(intersection_size(a, b), 1U);
  EXPECT_TRUE(is_subset(Set(3, {1, 2}), a));
  EXPECT_EQ(translate(a, 4), Set(3, {4, 5, 6}));
  EXPECT_EQ(sumset(a, b), Set(3, {0, 1, 2, 3}));
  EXPECT_EQ(linear_span(3, std::vector<Word>{1, 2}), Set(3, {0, 1, 2, 3}));
}

TEST(Dotplus, TwoSubsetsOfBasis) {
  const Set basis(3, {1, 2, 4});
  EXPECT_EQ(dotplus_power(basis, 2), Set(3, {3, 5, 6}));
}

TEST(Dotplus, CollisionsMerge) {
  const Set s(2, {1, 2, 3});
  EXPECT_EQ(dotplus_power(s, 2), Set(2, {1, 2, 3}));
}

TEST(Dotplus, DissociatedHasBinomialSize) {
  const Set basis(4, {1, 2, 4, 8});
  EXPECT_EQ(dotplus_power(basis, 2).size(), 6U);
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8 + static_cast<int>(oracle::below(rng, 5));
    const int m = 3 + static_cast<int>(oracle::below(rng, 6));
    const Set l = random_dissociated(n, m, rng());
    for (int d = 1; d <= m; ++d) {
      ASSERT_EQ(BigInt(dotplus_power(l, d).size()), binomial(static_cast<unsigned>(m), static_cast<unsigned>(d)));
    }
  }
}

TEST(Dotplus, MatchesNaiveAndIsSymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(oracle::below(rng, 4));
    const std::size_t d = 1 + oracle::below(rng, 3);
    std::vector<Set> sets;
    for (std::size_t i = 0; i < d; ++i) sets.push_back(oracle::random_set(rng, n, 1 + oracle::below(rng, 5)));
    const Set got = dotplus(sets);
    ASSERT_EQ(got, oracle::naive_dotplus(sets));
    std::vector<Set> reversed(sets.rbegin(), sets.rend());
    ASSERT_EQ(dotplus(reversed), got);
    Set ordinary = sets.front();
    for (std::size_t i = 1; i < d; ++i) ordinary = sumset(ordinary, sets[i]);
    ASSERT_TRUE(is_subset(got, ordinary));
  }
}

TEST(Dotplus, PowerMatchesNaive) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Set a = oracle::random_set(rng, 5, 2 + oracle::below(rng, 6));
    const int d = 1 + static_cast<int>(oracle::below(rng, 4));
    ASSERT_EQ(dotplus_power(a, d), oracle::naive_dotplus(std::vector<Set>(static_cast<std::size_t>(d), a)));
  }
}

TEST(Dotplus, Errors) {
  EXPECT_THROW(dotplus(std::span<const Set>{}), std::invalid_argument);
  const Set a = Set::full(10);
  EXPECT_THROW(dotplus_power(a, 5, 1000), BudgetExceeded);
}

TEST(SetFile, ParsesBasis) {
  const Set s = parse_set("2\n10\n01\n");
  EXPECT_EQ(s, Set(2, {1, 2}));
}

TEST(SetFile, RoundTripCanonical) {
  const Set s = parse_set("# comment\n3\n\n111\n001\n100\n");
  EXPECT_EQ(serialize_set(s), "3\n100\n001\n111\n");
  EXPECT_EQ(parse_set(serialize_set(s)), s);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Set r = oracle::random_set(rng, 7, oracle::below(rng, 40));
    ASSERT_EQ(parse_set(serialize_set(r)), r);
  }
}

TEST(SetFile, Errors) {
  try {
    parse_set("3\n102\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("bad character"), std::string::npos);
  }
  try {
    parse_set("3\n10\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  try {
    parse_set("2\n10\n01\n10\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
  EXPECT_THROW(parse_set(""), ParseError);
  EXPECT_THROW(parse_set("abc\n"), ParseError);
  EXPECT_THROW(parse_set("31\n"), ParseError);
}
