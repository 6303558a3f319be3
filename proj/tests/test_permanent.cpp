#include <gtest/gtest.h>

#include <sstream>

#include "f2ac/dissociation.hpp"
#include "f2ac/energy.hpp"
#include "f2ac/permanent.hpp"
#include "oracles.hpp"

using namespace f2ac;

namespace {

std::vector<std::vector<std::int64_t>> rows_of(const CombMatrix& h) {
  std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(h(i, j));
  }
  return out;
}

CombMatrix random_matrix(Rng& rng, int x, int y, std::uint64_t max_entry) {
  CombMatrix h(x, y);
  for (int i = 0; i < x; ++i) {
    for (int j = 0; j < y; ++j) h(i, j) = static_cast<std::int64_t>(oracle::below(rng, max_entry + 1));
  }
  return h;
}

}  // namespace

TEST(Permanent, SmallValues) {
  EXPECT_EQ(permanent(CombMatrix::Identity(3, 3)), 1);
  EXPECT_EQ(permanent(CombMatrix::Ones(3, 3)), 6);
  EXPECT_EQ(permanent(CombMatrix::Ones(2, 3)), 6);
  EXPECT_EQ(permanent(CombMatrix(0, 3)), 1);
  EXPECT_EQ(permanent(CombMatrix::Ones(4, 6)), 360);
  EXPECT_THROW(permanent(CombMatrix::Ones(3, 2)), PreconditionError);
  CombMatrix neg = CombMatrix::Ones(2, 2);
  neg(0, 0) = -1;
  EXPECT_THROW(permanent(neg), PreconditionError);
}

TEST(Permanent, MatchesInjectiveMapOracle) {
  Rng rng(201);
  for (int trial = 0; trial < 300; ++trial) {
    const int x = 1 + static_cast<int>(oracle::below(rng, 5));
    const int y = x + static_cast<int>(oracle::below(rng, 3));
    const CombMatrix h = random_matrix(rng, x, y, 3);
    const BigInt expected = oracle::naive_permanent(rows_of(h));
    ASSERT_EQ(permanent_ryser(h), expected);
    ASSERT_EQ(permanent_expand(h), expected);
    ASSERT_EQ(permanent(h), expected);
  }
}

TEST(Permanent, LargeEntriesUseBigIntegers) {
  const CombMatrix h = CombMatrix::Constant(6, 6, std::int64_t{1} << 30);
  EXPECT_EQ(permanent_ryser(h), BigInt(720) * ipow(BigInt(1) << 30, 6));
}

TEST(Permanent, RowPermutationInvariantAndMonotone) {
  Rng rng(203);
  for (int trial = 0; trial < 100; ++trial) {
    const int x = 2 + static_cast<int>(oracle::below(rng, 5));
    CombMatrix h = random_matrix(rng, x, x, 2);
    const BigInt base = permanent(h);
    CombMatrix swapped = h;
    swapped.row(0).swap(swapped.row(x - 1));
    ASSERT_EQ(permanent(swapped), base);
    CombMatrix bigger = h;
    bigger(static_cast<Eigen::Index>(oracle::below(rng, static_cast<std::uint64_t>(x))), 0) += 1;
    ASSERT_GE(permanent(bigger), base);
  }
}

TEST(FrobeniusKonig, Examples) {
  CombMatrix h(2, 2);
  h << 0, 0, 1, 1;
  const FkResult z = fk_zero_test(h);
  EXPECT_TRUE(z.zero);
  EXPECT_EQ(z.zero_rows, std::vector<int>{0});
  EXPECT_EQ(z.zero_cols, (std::vector<int>{0, 1}));
  EXPECT_TRUE(verify_fk(h, z));

  const FkResult pos = fk_zero_test(CombMatrix::Identity(3, 3));
  EXPECT_FALSE(pos.zero);
  EXPECT_EQ(pos.diagonal, (std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(FrobeniusKonig, ExhaustiveFourByFour) {
  CombMatrix h(4, 4);
  for (std::uint32_t code = 0; code < (1U << 16); ++code) {
    for (int c = 0; c < 16; ++c) h(c / 4, c % 4) = (code >> c) & 1U;
    const FkResult r = fk_zero_test(h);
    ASSERT_EQ(r.zero, permanent(h) == 0) << code;
    ASSERT_TRUE(verify_fk(h, r)) << code;
  }
}

TEST(FrobeniusKonig, RandomRectangular) {
  Rng rng(207);
  for (int trial = 0; trial < 2000; ++trial) {
    const int x = 1 + static_cast<int>(oracle::below(rng, 8));
    const int y = 1 + static_cast<int>(oracle::below(rng, 8));
    const CombMatrix h = random_matrix(rng, x, y, 1);
    const FkResult r = fk_zero_test(h);
    const CombMatrix m = x <= y ? h : CombMatrix(h.transpose());
    ASSERT_EQ(r.zero, permanent(m) == 0);
    ASSERT_TRUE(verify_fk(h, r));
  }
}

TEST(ReducedPermanent, Cases) {
  const ReducedPermanentReport twice = reduced_permanent_check(2 * CombMatrix::Identity(3, 3));
  EXPECT_TRUE(twice.hypotheses_hold);
  EXPECT_EQ(twice.kept_columns, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(twice.per_h0_positive.value());
  EXPECT_EQ(permanent(2 * CombMatrix::Identity(3, 3)), 8);

  CombMatrix bad(2, 2);
  bad << 1, 0, 1, 2;
  const ReducedPermanentReport r = reduced_permanent_check(bad);
  EXPECT_FALSE(r.rows_ok);
  EXPECT_FALSE(r.hypotheses_hold);
  EXPECT_FALSE(r.per_h0_positive.has_value());

  // Every column sum is 1: H_0 is empty and trivially positive.
  CombMatrix spread(2, 4);
  spread << 1, 1, 0, 0, 0, 0, 1, 1;
  EXPECT_TRUE(reduced_permanent_check(spread).per_h0_positive.value());
}

TEST(ReducedPermanent, ExhaustiveSmallFamily) {
  for (int p = 1; p <= 3; ++p) {
    for (int r = 1; r <= 4; ++r) {
      const ExhaustiveSummary s = lemma_per0_exhaustive(p, r);
      EXPECT_EQ(s.falsified, 0U) << p << "x" << r;
      EXPECT_EQ(s.oracle_mismatches, 0U) << p << "x" << r;
    }
  }
  EXPECT_GT(lemma_per0_exhaustive(3, 4).satisfying, 0U);
}

TEST(PiValue, AllTwos) {
  const PiReport r = pi_value({2, 2, 2, 2, 2}, 5, Rational(1, 2));
  EXPECT_FALSE(r.z_found);
  EXPECT_EQ(r.pi, 32);
  EXPECT_EQ(r.bound, 1024);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.hypotheses_hold);
}

TEST(PiValue, WorkedTuple) {
  const PiReport r = pi_value({4, 2, 2}, 4, Rational(1));
  EXPECT_EQ(r.T, 4);
  EXPECT_EQ(r.alpha, (std::vector<int>{1, 1, 3}));
  EXPECT_EQ(r.z, 2);
  EXPECT_EQ(r.q_z, 2);
  EXPECT_EQ(r.pi, 48);
  EXPECT_EQ(r.bound, 4096);
  EXPECT_TRUE(r.holds);
  // r >= p - delta0 needs delta0 >= 1 while p >= 2 delta0 + 3 needs delta0 <= 1/2.
  EXPECT_FALSE(r.hypotheses_hold);
}

TEST(PiValue, RationalExponentBound) {
  // delta0 = 3/2: bound = 2^{3p} (3/2)^6.
  const PiReport r = pi_value({5, 2, 2, 2, 2, 2, 2, 2, 3}, 11, Rational(3, 2));
  EXPECT_EQ(r.bound, floor(Rational(BigInt(1) << 33) * ipow(Rational(3, 2), 6)));
  EXPECT_TRUE(r.holds);
}

TEST(PiValue, LemmaNeverFails) {
  // All admissible tuples for small p and rational delta0 on a grid.
  for (int p = 3; p <= 12; ++p) {
    std::vector<int> ts;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
      if (remaining == 0) {
        for (int num = 1; num <= 4 * p; ++num) {
          const Rational d(num, 4);
          const PiReport r = pi_value(ts, p, d);
          if (r.hypotheses_hold) ASSERT_TRUE(r.holds) << p << " " << to_string(d);
        }
        return;
      }
      for (int t = std::min(max_part, remaining); t >= 2; --t) {
        if (remaining - t == 1) continue;
        ts.push_back(t);
        self(self, remaining - t, t);
        ts.pop_back();
      }
    };
    rec(rec, 2 * p, 2 * p);
  }
}

TEST(PiValue, StructuralErrors) {
  EXPECT_THROW(pi_value({1, 3}, 2, Rational(1)), PreconditionError);
  EXPECT_THROW(pi_value({2, 2}, 3, Rational(1)), PreconditionError);
}

TEST(Sophisticated, EqualSetsAndDisjoint) {
  const Set lambda0 = random_dissociated(10, 5, 11);
  const std::vector<Set> same(4, lambda0);
  const SophisticatedReport r = sophisticated_bound(same, {{0}, {1}, {2}, {3}}, lambda0);
  EXPECT_EQ(r.z, energy_spectral(lambda0, 2));
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.corollary_holds);

  const Set lambda = random_dissociated(10, 8, 12);
  std::vector<Set> parts;
  for (std::size_t i = 0; i < 4; ++i) parts.push_back(Set(10, {lambda[2 * i], lambda[2 * i + 1]}));
  const SophisticatedReport d = sophisticated_bound(parts, {{0, 1}, {2, 3}}, lambda);
  EXPECT_EQ(d.z, 0);
  EXPECT_TRUE(d.holds);
}

TEST(Sophisticated, SingletonsPairedClasses) {
  const Set lambda = random_dissociated(8, 4, 13);
  const std::vector<Set> es{Set(8, {lambda[0]}), Set(8, {lambda[0]}), Set(8, {lambda[1]}), Set(8, {lambda[1]})};
  const SophisticatedReport r = sophisticated_bound(es, {{0, 1}, {2, 3}}, lambda);
  EXPECT_EQ(r.z, 1);
  EXPECT_GE(r.bound, r.z);
}

TEST(Sophisticated, Refusals) {
  const Set dependent(3, {1, 2, 3});
  const std::vector<Set> es(4, dependent);
  EXPECT_THROW(sophisticated_bound(es, {{0, 1, 2, 3}}, dependent), PreconditionError);
  const Set lambda = random_dissociated(8, 4, 3);
  EXPECT_THROW(sophisticated_bound(std::vector<Set>(4, lambda), {{0, 1}, {2}}, lambda), PreconditionError);
  EXPECT_THROW(sophisticated_bound(std::vector<Set>(4, Set(8, {255})), {{0, 1, 2, 3}}, lambda), PreconditionError);
}

TEST(Sophisticated, RandomInstances) {
  Rng rng(211);
  for (int trial = 0; trial < 60; ++trial) {
    const int p = 2 + static_cast<int>(oracle::below(rng, 2));
    const Set lambda = random_dissociated(9, 6, rng());
    std::vector<Set> es;
    for (int i = 0; i < 2 * p; ++i) {
      Set e = oracle::random_subset(rng, lambda, 1, 2);
      if (e.empty()) e = Set(9, {lambda[0]});
      es.push_back(e);
    }
    std::vector<std::vector<int>> classes;
    for (int i = 0; i < 2 * p; ++i) {
      const std::size_t c = oracle::below(rng, classes.size() + 1);
      if (c == classes.size()) classes.emplace_back();
      classes[c].push_back(i);
    }
    const SophisticatedReport r = sophisticated_bound(es, classes, lambda);
    ASSERT_EQ(r.z, oracle::naive_energy_multi(es));
    ASSERT_TRUE(r.holds);
    ASSERT_TRUE(r.corollary_holds);
  }
}

TEST(MatrixFile, RoundTripAndErrors) {
  std::istringstream in("2 3\n1 0 2\n0 1 1\n");
  const CombMatrix h = parse_matrix(in);
  EXPECT_EQ(h(0, 2), 2);
  std::istringstream again(serialize_matrix(h));
  EXPECT_EQ(parse_matrix(again), h);

  std::istringstream short_row("2 2\n1 0\n1\n");
  try {
    parse_matrix(short_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream negative("1 1\n-1\n");
  EXPECT_THROW(parse_matrix(negative), ParseError);
  std::istringstream extra("1 1\n1\n1\n");
  EXPECT_THROW(parse_matrix(extra), ParseError);
}
