#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "f2ac/dissociation.hpp"
#include "f2ac/energy.hpp"
#include "f2ac/structure.hpp"
#include "oracles.hpp"

using namespace f2ac;

namespace {

Set subset_of(const Set& q, std::uint64_t mask) {
  std::vector<Word> w;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if ((mask >> i) & 1U) w.push_back(q[i]);
  }
  return Set(q.dim(), w);
}

// T(B) < C^{2k} (|B|/|Q|)^{2k} T(Q), cross-multiplied.
bool violates(const BigInt& tb, std::size_t b, const BigInt& tq, std::size_t m, const Rational& c, int k) {
  const Rational lhs = Rational(tb) * ipow(Rational(BigInt(m)), 2 * k);
  const Rational rhs = ipow(c, 2 * k) * ipow(Rational(BigInt(b)), 2 * k) * Rational(tq);
  return lhs < rhs;
}

Set pair_sums(const Set& lambda) {
  std::vector<Word> w;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = i + 1; j < lambda.size(); ++j) w.push_back(lambda[i] ^ lambda[j]);
  }
  return Set(lambda.dim(), w);
}

// Dense subspace plus scattered high words: energy concentrates on the subspace.
Set lopsided(int dim, int extra, std::uint64_t seed) {
  std::vector<Word> w;
  for (Word x = 0; x < (Word{1} << dim); ++x) w.push_back(x);
  Rng rng(seed);
  while (static_cast<int>(w.size()) < (1 << dim) + extra) {
    w.push_back(static_cast<Word>(uniform_below(rng, Word{1} << 20) | (Word{1} << 19)));
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
  }
  return Set(20, w);
}

}  // namespace

TEST(Connectedness, ExhaustiveSearchMatchesOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t size = 4 + oracle::below(rng, 5);
    const Set q = oracle::random_set(rng, 5, size);
    ConnectednessParams cp;
    cp.c = 1;
    cp.beta1 = Rational(1, 8);
    const ViolationSearch got = find_violation(q, cp, rng);
    EXPECT_TRUE(got.exhaustive);
    const BigInt tq = oracle::naive_energy(q, 2);
    const std::size_t lo = static_cast<std::size_t>(ceil(cp.beta1 * BigInt(q.size())));
    const std::size_t hi = static_cast<std::size_t>(floor(cp.beta2 * BigInt(q.size())));
    std::optional<std::pair<Rational, Set>> best;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q.size()); ++mask) {
      const auto b = static_cast<std::size_t>(__builtin_popcountll(mask));
      if (b < std::max<std::size_t>(lo, 1) || b > hi) continue;
      const Set sub = subset_of(q, mask);
      const BigInt tb = oracle::naive_energy(sub, 2);
      if (!violates(tb, b, tq, q.size(), cp.c, 2)) continue;
      const Rational ratio = Rational(tb) / ipow(Rational(BigInt(b)), 4);
      if (!best || ratio < best->first) best = std::make_pair(ratio, sub);
    }
    ASSERT_EQ(got.violator.has_value(), best.has_value()) << trial;
    if (best) {
      const Set& v = *got.violator;
      const Rational ratio = Rational(oracle::naive_energy(v, 2)) / ipow(Rational(BigInt(v.size())), 4);
      EXPECT_EQ(ratio, best->first);
      EXPECT_TRUE(is_subset(v, q));
    }
  }
}

TEST(Connectedness, PairSumsOfDissociatedSetAreCertifiedConnected) {
  const Set lambda = random_dissociated(12, 6, 3);
  const Set all = pair_sums(lambda);
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const Set q = oracle::random_subset(rng, all, 2, 3);
    if (q.size() <= 2) continue;
    const ConnectednessResult r = refine_connected(q, ConnectednessParams{});
    EXPECT_TRUE(r.trace.empty());
    EXPECT_EQ(r.status, ConnectednessStatus::kCertified);
    EXPECT_EQ(r.refined, q);
    ASSERT_TRUE(r.step_bound_holds.has_value());
    EXPECT_TRUE(*r.step_bound_holds);
  }
}

TEST(Connectedness, RemovesScatteredPart) {
  const Set q = lopsided(6, 22, 5);
  ConnectednessParams cp;
  cp.c = 1;
  cp.search_budget = 4000;
  const ConnectednessResult r = refine_connected(q, cp);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.status, ConnectednessStatus::kBestEffort);
  EXPECT_TRUE(r.complement_bound_ok);
  EXPECT_TRUE(r.dk_increase_ok);
  EXPECT_TRUE(r.size_bound_holds);
  EXPECT_FALSE(r.step_gain_ok.has_value());
  Set cur = q;
  for (const ConnectednessStep& s : r.trace) {
    EXPECT_EQ(s.energy_before, energy_bruteforce(cur, 2));
    cur = set_difference(cur, s.removed);
    EXPECT_EQ(s.energy_after, energy_bruteforce(cur, 2));
    // D_2 = T / |Q|^2 must rise when (1 - Cc)^2 / (1 - c) > 1; at C = 1 it need not.
    const Rational c(BigInt(s.removed.size()), BigInt(s.size_before));
    const bool guaranteed = (1 - cp.c * c) * (1 - cp.c * c) / (1 - c) > 1;
    EXPECT_FALSE(guaranteed);
    const bool rose = s.energy_after * BigInt(s.size_before) * BigInt(s.size_before) >
                      s.energy_before * BigInt(s.size_after) * BigInt(s.size_after);
    EXPECT_TRUE(rose || !guaranteed);
  }
  EXPECT_EQ(cur, r.refined);
}

TEST(Connectedness, Preconditions) {
  EXPECT_THROW(refine_connected(Set(4, {1, 2}), ConnectednessParams{}), PreconditionError);
  ConnectednessParams bad;
  bad.beta1 = Rational(3, 4);
  EXPECT_THROW(refine_connected(Set(4, {1, 2, 3}), bad), PreconditionError);
  bad = ConnectednessParams{};
  bad.k = 1;
  EXPECT_THROW(refine_connected(Set(4, {1, 2, 3}), bad), PreconditionError);
}

TEST(Greedy, FirstFeasibleByIndex) {
  const std::vector<std::vector<int>> s{{0, 1, 2, 3}, {0, 1, 4, 5}, {3, 6, 7, 8}, {9, 10, 11, 12}, {1, 9, 13, 14}};
  const GreedyResult g = greedy_disjoint_supports(s, Rational(1, 4), 10);
  EXPECT_EQ(g.indices, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(g.overlaps, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(greedy_disjoint_supports(s, Rational(1, 2), 10).indices, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(greedy_disjoint_supports(s, Rational(1, 4), 2).indices.size(), 2U);
  EXPECT_THROW(greedy_disjoint_supports({{0, 1}, {2}}, Rational(1, 2), 3), PreconditionError);
}

TEST(Greedy, RandomAgainstSimulation) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(oracle::below(rng, 4));
    std::vector<std::vector<int>> s;
    for (int i = 0; i < 12; ++i) {
      std::set<int> v;
      while (static_cast<int>(v.size()) < p) v.insert(static_cast<int>(oracle::below(rng, 20)));
      s.emplace_back(v.begin(), v.end());
    }
    const Rational zeta(static_cast<long>(oracle::below(rng, 3)), 4);
    const GreedyResult g = greedy_disjoint_supports(s, zeta, 12);
    std::set<int> u(s[0].begin(), s[0].end());
    std::vector<std::size_t> expect{0};
    for (std::size_t i = 1; i < s.size(); ++i) {
      // Rescanning from the start each time is what the first-feasible rule means;
      // a later pick can never make an earlier rejected set feasible again.
      std::size_t ov = 0;
      for (int x : s[i]) ov += u.count(x);
      if (Rational(BigInt(ov)) <= zeta * p) {
        expect.push_back(i);
        u.insert(s[i].begin(), s[i].end());
      }
    }
    EXPECT_EQ(g.indices, expect);
  }
}

TEST(Greedy, ThresholdDistinctSingletons) {
  // All blocks distinct singletons: inner sum is C(p, p - omega).
  const std::vector<std::vector<int>> blocks{{0}, {1}, {2}};
  const Rational got = greedy_threshold(blocks, Rational(1, 3), 2);
  Rational expect = 0;
  for (int omega = 1; omega <= 3; ++omega) {
    expect += Rational(ipow(BigInt(6), static_cast<unsigned>(omega)), factorial(static_cast<unsigned>(omega))) *
              binomial(3, static_cast<unsigned>(3 - omega));
  }
  EXPECT_EQ(got, 2 * expect);
  EXPECT_THROW(greedy_threshold({{0, 1}, {1, 2}}, Rational(1, 2), 1), PreconditionError);
}

TEST(Bombieri, ExhaustiveMatchesOracleAndBoundHolds) {
  Rng rng(31);
  for (int trial = 0; trial < 80; ++trial) {
    const Set ground = oracle::random_set(rng, 5, 12);
    const std::size_t q = 3 + oracle::below(rng, 4);
    std::vector<Set> sets;
    std::size_t min_size = ground.size();
    for (std::size_t i = 0; i < q; ++i) {
      Set s = oracle::random_subset(rng, ground, 2, 3);
      if (s.empty()) s = Set(5, {ground[0]});
      min_size = std::min(min_size, s.size());
      sets.push_back(std::move(s));
    }
    const Rational lambda(BigInt(min_size), BigInt(ground.size()));
    const auto tmax = static_cast<std::size_t>(floor(lambda * BigInt(q)));
    if (tmax < 1) continue;
    const std::size_t t = 1 + oracle::below(rng, tmax);
    const BombieriResult r = bombieri_intersection(sets, ground, lambda, t);
    ASSERT_TRUE(r.exhaustive);
    std::size_t best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != t) continue;
      std::size_t count = 0;
      for (Word x : ground) {
        bool all = true;
        for (std::size_t i = 0; i < q; ++i) all = all && (((mask >> i) & 1U) == 0 || sets[i].contains(x));
        count += all ? 1 : 0;
      }
      best = std::max(best, count);
    }
    EXPECT_EQ(r.intersection.size(), best);
    ASSERT_TRUE(r.bound_holds.has_value());
    EXPECT_TRUE(*r.bound_holds);
    EXPECT_EQ(r.indices.size(), t);
  }
}

TEST(Bombieri, Preconditions) {
  const Set ground(4, {1, 2, 3, 4});
  const std::vector<Set> sets{Set(4, {1, 2}), Set(4, {2, 3})};
  EXPECT_THROW(bombieri_intersection(sets, ground, Rational(3, 4), 1), PreconditionError);
  EXPECT_THROW(bombieri_intersection(sets, ground, Rational(1, 2), 2), PreconditionError);
  EXPECT_THROW(bombieri_intersection({Set(4, {1, 5})}, ground, Rational(1, 4), 1), PreconditionError);
  const BombieriResult r = bombieri_intersection(sets, ground, Rational(1, 2), 1);
  EXPECT_EQ(r.intersection.size(), 2U);
}

TEST(Fibers, SumIndexAndInvariants) {
  const Set lambda = random_dissociated(16, 10, 8);
  const SumIndex idx(lambda, 3);
  EXPECT_FALSE(idx.ambiguous());
  EXPECT_EQ(idx.decompose(lambda[1] ^ lambda[4] ^ lambda[7]), (std::vector<int>{1, 4, 7}));
  EXPECT_TRUE(idx.decompose(lambda[1]).empty());
  EXPECT_TRUE(SumIndex(Set(3, {1, 2, 4, 7}), 2).ambiguous());

  Rng rng(9);
  const Set l1(16, {lambda[0], lambda[1], lambda[2], lambda[3], lambda[4]});
  const Set l2 = set_difference(lambda, l1);
  for (int trial = 0; trial < 30; ++trial) {
    const Set q = oracle::random_subset(rng, pair_sums(lambda), 1, 2);
    const FiberDecomposition fd = decompose_fibers(q, l1, l2);
    EXPECT_TRUE(check_fiber_invariants(fd));
    std::size_t cross = 0;
    for (Word a : l1) {
      for (Word b : l2) cross += q.contains(a ^ b) ? 1 : 0;
    }
    EXPECT_EQ(fd.covered.size(), cross);
  }
  EXPECT_THROW(decompose_fibers(Set(16), l1, l1), PreconditionError);
}

TEST(Inverse2, HoldsOnFullBipartiteSums) {
  const Set lambda = random_dissociated(20, 16, 2);
  std::vector<Word> a(lambda.begin(), lambda.begin() + 14);
  std::vector<Word> b(lambda.begin() + 14, lambda.end());
  const Set l1(20, a);
  const Set l2(20, b);
  const Set q = sumset(l1, l2);
  const FiberDecomposition fd = decompose_fibers(q, l1, l2);
  const Inverse2Report r = inverse2_bound(fd, 5, Rational(1, 2));
  EXPECT_TRUE(r.hypothesis_holds);
  EXPECT_EQ(r.lhs, energy_bruteforce(q, 5));
  EXPECT_EQ(r.verdict, Verdict::kHolds);
  EXPECT_LE(r.delta0_lo, r.delta0.lo);
  EXPECT_GE(r.delta0_hi, r.delta0.hi);
  // Every fiber is all of Lambda2: each |S| = r term is r^r 2^r.
  for (std::size_t rr = 0; rr < r.support_sums.size(); ++rr) {
    const BigInt each = ipow(BigInt(2 * rr), static_cast<unsigned>(rr));
    EXPECT_EQ(r.support_sums[rr], binomial(14, static_cast<unsigned>(rr)) * each) << rr;
  }
}

TEST(Inverse2, HypothesisAndBudget) {
  const Set lambda = random_dissociated(16, 8, 3);
  const Set l1(16, {lambda[0], lambda[1], lambda[2]});
  const Set l2 = set_difference(lambda, l1);
  const FiberDecomposition fd = decompose_fibers(sumset(l1, l2), l1, l2);
  EXPECT_EQ(inverse2_bound(fd, 5, Rational(4)).status, "hypothesis-not-met");
  EXPECT_THROW(inverse2_bound(fd, 4, Rational(1)), PreconditionError);
  EXPECT_THROW(inverse2_bound(fd, 7, Rational(1)), BudgetExceeded);
}

TEST(Plant, GeneratorInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlantParams pp;
    pp.h = 1 + static_cast<int>(seed % 3);
    pp.noise = Rational(1, 10);
    pp.seed = seed;
    const PlantedInstance inst = plant_instance(pp);
    EXPECT_EQ(inst.lambda.size(), 16U);
    EXPECT_TRUE(is_dissociated(inst.lambda));
    EXPECT_TRUE(rectangles_valid(inst.planted, inst.q));
    EXPECT_EQ(inst.planted_union.size(), 16U * static_cast<std::size_t>(pp.h));
    EXPECT_EQ(inst.noise.size(), inst.planted_union.size() / 10);
    EXPECT_EQ(intersection_size(inst.noise, inst.planted_union), 0U);
    EXPECT_EQ(inst.q.size(), inst.planted_union.size() + inst.noise.size());
    EXPECT_EQ(planted_coverage(inst.planted, inst.planted_union), 1.0);
  }
  PlantParams bad;
  bad.lsize = 10;
  bad.lpsize = 10;
  EXPECT_THROW(plant_instance(bad), PreconditionError);
}

TEST(Extraction, RecoversPlantedRectangles) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    PlantParams pp;
    pp.h = 1 + static_cast<int>(seed % 3);
    pp.noise = Rational(1, 10);
    pp.seed = 500 + seed;
    const PlantedInstance inst = plant_instance(pp);
    InverseParams ip;
    ip.seed = seed;
    const ExtractionResult r = extract_rectangles_pair(inst.q, inst.lambda, ip);
    EXPECT_TRUE(r.containment_ok);
    EXPECT_TRUE(r.disjointness_ok);
    EXPECT_TRUE(rectangles_valid(r.rectangles, inst.q));
    EXPECT_EQ(r.family, FamilyStatus::kTrue);
    if (planted_coverage(r.rectangles, inst.planted_union) >= 0.9) ++good;
  }
  EXPECT_GE(good, 11);
}

TEST(Extraction, DeterministicForSeed) {
  PlantParams pp;
  pp.h = 2;
  pp.seed = 77;
  const PlantedInstance inst = plant_instance(pp);
  InverseParams ip;
  ip.seed = 3;
  const ExtractionResult a = extract_rectangles_pair(inst.q, inst.lambda, ip);
  const ExtractionResult b = extract_rectangles_pair(inst.q, inst.lambda, ip);
  ASSERT_EQ(a.rectangles.size(), b.rectangles.size());
  for (std::size_t i = 0; i < a.rectangles.size(); ++i) {
    EXPECT_EQ(a.rectangles[i].l, b.rectangles[i].l);
    EXPECT_EQ(a.rectangles[i].lp, b.rectangles[i].lp);
  }
}

TEST(Extraction, NoFabricatedRectangle) {
  // A perfect matching contains no 2 x 2 rectangle.
  const Set lambda = random_dissociated(16, 10, 6);
  std::vector<Word> w;
  for (std::size_t i = 0; i + 1 < lambda.size(); i += 2) w.push_back(lambda[i] ^ lambda[i + 1]);
  const Set q(16, w);
  const ExtractionResult r = extract_rectangles_pair(q, lambda, InverseParams{});
  EXPECT_TRUE(r.rectangles.empty());
  EXPECT_FALSE(r.trace.empty());
  EXPECT_EQ(r.covered, 0U);
}

TEST(Extraction, Preconditions) {
  const Set lambda = random_dissociated(16, 8, 6);
  EXPECT_THROW(extract_rectangles_pair(Set(16, {lambda[0]}), lambda, InverseParams{}), PreconditionError);
  EXPECT_THROW(extract_rectangles_pair(Set(16), Set(16, {1, 2, 3}), InverseParams{}), PreconditionError);
  InverseParams bad;
  bad.rounds = 0;
  EXPECT_THROW(extract_rectangles_pair(Set(16), lambda, bad), PreconditionError);
}

TEST(Extraction, ThreeFoldPrefix) {
  const Set lambda = random_dissociated(20, 12, 14);
  const Word a = lambda[0];
  const Set l(20, {lambda[1], lambda[2], lambda[3]});
  const Set lp(20, {lambda[4], lambda[5], lambda[6], lambda[7]});
  const Set q = translate(sumset(l, lp), a);
  InverseParams ip;
  ip.seed = 1;
  const DExtractionResult r = extract_rectangles_d(q, lambda, 3, ip);
  ASSERT_TRUE(r.rectangle.has_value());
  EXPECT_TRUE(r.containment_ok);
  EXPECT_EQ(r.rectangle->prefix.size(), 1U);
  EXPECT_TRUE(is_subset(r.rectangle->sum_set(), q));
  EXPECT_GE(r.rectangle->l.size() * r.rectangle->lp.size(), 4U);
  EXPECT_EQ(r.parts.size(), 3U);
}

TEST(Rectangles, Validity) {
  const Set lambda = random_dissociated(16, 8, 1);
  Rectangle r1{{}, Set(16, {lambda[0], lambda[1]}), Set(16, {lambda[2], lambda[3]})};
  Rectangle r2{{}, Set(16, {lambda[4], lambda[5]}), Set(16, {lambda[6], lambda[7]})};
  const Set q = set_union(r1.sum_set(), r2.sum_set());
  EXPECT_TRUE(rectangles_valid({r1, r2}, q));
  EXPECT_FALSE(rectangles_valid({r1, r1}, q));
  EXPECT_FALSE(rectangles_valid({r1}, r2.sum_set()));
  Rectangle overlap{{}, Set(16, {lambda[0], lambda[1]}), Set(16, {lambda[1], lambda[2]})};
  EXPECT_FALSE(rectangles_valid({overlap}, pair_sums(lambda)));
}
