#include "f2ac/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "f2ac/energy.hpp"

namespace f2ac {

namespace {

BigInt pow_int(const BigInt& b, int e) { return ipow(b, static_cast<unsigned>(e)); }
Rational pow_rat(const Rational& b, int e) { return ipow(b, static_cast<unsigned>(e)); }

BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

std::vector<Word> words_of(const Set& s) { return {s.begin(), s.end()}; }

int popcount64(std::uint64_t x) { return __builtin_popcountll(x); }

}  // namespace

// ---------------------------------------------------------------------------
// Connectedness

std::string_view to_string(ConnectednessStatus s) {
  return s == ConnectednessStatus::kCertified ? "certified" : "best-effort";
}

void ConnectednessParams::validate() const {
  if (k < 2) throw PreconditionError("connectedness degree k must be at least 2");
  if (beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1) throw PreconditionError("beta1, beta2 must lie in (0,1)");
  if (beta1 > beta2) throw PreconditionError("beta1 must not exceed beta2");
  if (c <= 0 || c > 1) throw PreconditionError("C must lie in (0,1]");
  if (d < 1) throw PreconditionError("d must be positive");
  if (exhaustive_limit < 0 || exhaustive_limit > 24) throw PreconditionError("exhaustive_limit must lie in [0,24]");
}

namespace {

// Violation test and ordering for candidate subsets of one Q_i.
class ViolationOracle {
 public:
  ViolationOracle(const Set& q, const ConnectednessParams& p) : q_(q), kernel_(q, p.k), k_(p.k) {
    const std::size_t m = q.size();
    lo_ = static_cast<std::size_t>(ceil(p.beta1 * m));
    hi_ = static_cast<std::size_t>(floor(p.beta2 * m));
    lo_ = std::max<std::size_t>(lo_, 1);
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    energy_ = kernel_(all);
    // T(B) |Q|^{2k} Cden^{2k} < Cnum^{2k} |B|^{2k} T(Q)  <=>  T(B) < cut[|B|]
    const BigInt lhs = pow_int(BigInt(m), 2 * k_) * pow_int(den(p.c), 2 * k_);
    const BigInt rhs = pow_int(num(p.c), 2 * k_) * energy_;
    cut_.resize(hi_ + 1);
    pow2k_.resize(hi_ + 1);
    for (std::size_t s = lo_; s <= hi_; ++s) {
      pow2k_[s] = pow_int(BigInt(s), 2 * k_);
      const BigInt r = rhs * pow2k_[s];
      cut_[s] = (r + lhs - 1) / lhs;
    }
  }

  std::size_t lo() const { return lo_; }
  std::size_t hi() const { return hi_; }
  const BigInt& energy() const { return energy_; }
  const SubsetEnergy& kernel() const { return kernel_; }

  bool violates(const BigInt& t, std::size_t s) const { return t < cut_[s]; }
  // T_a / s_a^{2k} < T_b / s_b^{2k}
  bool lower_ratio(const BigInt& ta, std::size_t sa, const BigInt& tb, std::size_t sb) const {
    return ta * pow2k_[sb] < tb * pow2k_[sa];
  }
  bool equal_ratio(const BigInt& ta, std::size_t sa, const BigInt& tb, std::size_t sb) const {
    return ta * pow2k_[sb] == tb * pow2k_[sa];
  }

 private:
  const Set& q_;
  SubsetEnergy kernel_;
  int k_;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  BigInt energy_;
  std::vector<BigInt> cut_;
  std::vector<BigInt> pow2k_;
};

struct Candidate {
  std::vector<std::size_t> pos;  // ascending
  BigInt energy;
};

// Most violating first; ties to the lexicographically smaller element list
// (positions are in ascending word order, so comparing positions suffices).
bool better(const ViolationOracle& o, const Candidate& a, const Candidate& b) {
  if (o.lower_ratio(a.energy, a.pos.size(), b.energy, b.pos.size())) return true;
  if (!o.equal_ratio(a.energy, a.pos.size(), b.energy, b.pos.size())) return false;
  return a.pos < b.pos;
}

ViolationSearch search_with(const Set& q, const ViolationOracle& oracle, const ConnectednessParams& params, Rng& rng) {
  ViolationSearch out;
  const std::size_t m = q.size();
  if (oracle.lo() > oracle.hi()) {
    out.exhaustive = true;
    return out;
  }
  std::optional<Candidate> best;
  auto consider = [&](Candidate&& c) {
    ++out.examined;
    if (!oracle.violates(c.energy, c.pos.size())) return;
    if (!best || better(oracle, c, *best)) best = std::move(c);
  };

  if (static_cast<int>(m) <= params.exhaustive_limit) {
    out.exhaustive = true;
    for (std::size_t s = oracle.lo(); s <= oracle.hi(); ++s) {
      // Gosper's hack over s-subsets.
      std::uint64_t mask = (std::uint64_t{1} << s) - 1;
      const std::uint64_t limit = std::uint64_t{1} << m;
      while (mask < limit) {
        const BigInt t = oracle.kernel().of_mask(mask);
        ++out.examined;
        if (oracle.violates(t, s)) {
          Candidate c;
          for (std::uint64_t x = mask; x != 0; x &= x - 1) c.pos.push_back(static_cast<std::size_t>(__builtin_ctzll(x)));
          c.energy = t;
          if (!best || better(oracle, c, *best)) best = std::move(c);
        }
        const std::uint64_t low = mask & (~mask + 1);
        const std::uint64_t ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
      }
    }
  } else {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    while (out.examined < params.search_budget) {
      const std::size_t s = oracle.lo() + uniform_below(rng, oracle.hi() - oracle.lo() + 1);
      shuffle(order.begin(), order.end(), rng);
      Candidate cur;
      cur.pos.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
      std::sort(cur.pos.begin(), cur.pos.end());
      cur.energy = oracle.kernel()(cur.pos);
      consider(Candidate(cur));
      if (s == m) continue;
      // Random single swaps, kept when the energy ratio drops.
      const std::size_t moves = 2 * m;
      for (std::size_t j = 0; j < moves && out.examined < params.search_budget; ++j) {
        std::vector<bool> in(m, false);
        for (std::size_t p : cur.pos) in[p] = true;
        const std::size_t drop = cur.pos[uniform_below(rng, s)];
        std::size_t add = 0;
        do {
          add = uniform_below(rng, m);
        } while (in[add]);
        Candidate next = cur;
        *std::find(next.pos.begin(), next.pos.end(), drop) = add;
        std::sort(next.pos.begin(), next.pos.end());
        next.energy = oracle.kernel()(next.pos);
        const bool improves = oracle.lower_ratio(next.energy, s, cur.energy, s);
        consider(Candidate(next));
        if (improves) cur = std::move(next);
      }
    }
  }
  if (best) {
    std::vector<Word> w;
    for (std::size_t p : best->pos) w.push_back(q[p]);
    out.violator = Set(q.dim(), std::move(w));
  }
  return out;
}

}  // namespace

ViolationSearch find_violation(const Set& q, const ConnectednessParams& params, Rng& rng) {
  params.validate();
  const ViolationOracle oracle(q, params);
  return search_with(q, oracle, params, rng);
}

ConnectednessResult refine_connected(const Set& q, const ConnectednessParams& params) {
  params.validate();
  if (q.size() <= 2) throw PreconditionError("refine_connected needs |Q| > 2");
  Rng rng(params.seed);
  ConnectednessResult out;
  Set cur = q;
  const int k = params.k;
  const Rational gain = 1 + params.beta1 * (1 - 4 * params.c);
  const bool small_c = params.c < Rational(1, 4);
  if (small_c) out.step_gain_ok = true;
  BigInt initial_energy;
  bool all_exhaustive = true;

  while (true) {
    const ViolationOracle oracle(cur, params);
    if (out.trace.empty()) initial_energy = oracle.energy();
    if (cur.size() <= 2) break;
    const ViolationSearch search = search_with(cur, oracle, params, rng);
    out.candidates_examined += search.examined;
    if (!search.exhaustive) all_exhaustive = false;
    if (!search.violator) break;

    ConnectednessStep step;
    step.removed = *search.violator;
    step.size_before = cur.size();
    step.energy_before = oracle.energy();
    step.energy_removed = energy_compressed(step.removed, k);
    step.exhaustive = search.exhaustive;
    Set next = set_difference(cur, step.removed);
    step.size_after = next.size();
    step.energy_after = energy_compressed(next, k);

    const BigInt m = step.size_before;
    const BigInt mb = step.size_after;
    const Rational cb(BigInt(step.removed.size()), m);
    const Rational shrink = 1 - params.c * cb;
    if (!(Rational(step.energy_after) > Rational(step.energy_before) * pow_rat(shrink, 2 * k))) {
      out.complement_bound_ok = false;
    }
    const BigInt after_scaled = step.energy_after * pow_int(m, k);
    const BigInt before_scaled = step.energy_before * pow_int(mb, k);
    if (shrink * shrink / (1 - cb) > 1 && !(after_scaled > before_scaled)) out.dk_increase_ok = false;
    if (small_c && !(Rational(after_scaled) > Rational(before_scaled) * pow_rat(gain, k))) out.step_gain_ok = false;

    out.trace.push_back(std::move(step));
    cur = std::move(next);
  }

  out.refined = cur;
  out.status = all_exhaustive ? ConnectednessStatus::kCertified : ConnectednessStatus::kBestEffort;
  const int s = static_cast<int>(out.trace.size());
  const BigInt q0 = q.size();
  const Rational keep = 1 - params.beta2;
  out.size_bound_holds = Rational(BigInt(cur.size())) >= pow_rat(keep, s) * Rational(q0);
  if (small_c) {
    const BigInt dd = params.d;
    const Rational lhs = pow_rat(gain, s * k) * Rational(initial_energy);
    const BigInt rhs = pow_int(dd, 8 * params.d) * pow_int(BigInt(k), k * params.d) * pow_int(q0, k);
    out.step_bound_holds = lhs <= Rational(rhs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Greedy supports

GreedyResult greedy_disjoint_supports(const std::vector<std::vector<int>>& supports, const Rational& zeta, int w) {
  GreedyResult out;
  if (supports.empty() || w <= 0) return out;
  std::vector<std::vector<int>> sets;
  sets.reserve(supports.size());
  for (const auto& s : supports) {
    std::vector<int> v = s;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() != s.size()) throw PreconditionError("support with repeated entries");
    sets.push_back(std::move(v));
  }
  const std::size_t p = sets.front().size();
  for (const auto& s : sets) {
    if (s.size() != p) throw PreconditionError("supports must all have the same size");
  }
  std::set<int> unite(sets[0].begin(), sets[0].end());
  out.indices.push_back(0);
  std::vector<bool> used(sets.size(), false);
  used[0] = true;
  const BigInt limit = num(zeta) * p;
  const BigInt scale = den(zeta);
  while (static_cast<int>(out.indices.size()) < w) {
    bool found = false;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (used[i]) continue;
      std::size_t overlap = 0;
      for (int x : sets[i]) overlap += unite.count(x);
      if (BigInt(overlap) * scale <= limit) {
        used[i] = true;
        out.indices.push_back(i);
        out.overlaps.push_back(overlap);
        unite.insert(sets[i].begin(), sets[i].end());
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  return out;
}

Rational greedy_threshold(const std::vector<std::vector<int>>& blocks, const Rational& zeta, int w) {
  const int p = static_cast<int>(blocks.size());
  if (p == 0) throw PreconditionError("greedy_threshold needs at least one block");
  std::vector<std::vector<int>> sorted;
  for (const auto& b : blocks) {
    std::vector<int> v = b;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    sorted.push_back(std::move(v));
  }
  std::vector<std::vector<int>> distinct;
  std::vector<int> mult;
  for (const auto& b : sorted) {
    bool matched = false;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (distinct[i] == b) {
        ++mult[i];
        matched = true;
        break;
      }
      std::vector<int> common;
      std::set_intersection(b.begin(), b.end(), distinct[i].begin(), distinct[i].end(), std::back_inserter(common));
      if (!common.empty()) throw PreconditionError("blocks must be pairwise equal or disjoint");
    }
    if (!matched) {
      distinct.push_back(b);
      mult.push_back(1);
    }
  }
  // coeff[r] = sum over n_1 + ... + n_rho = r, n_i <= l_i of prod a_i^{n_i} / n_i!
  std::vector<Rational> coeff(static_cast<std::size_t>(p) + 1, Rational(0));
  coeff[0] = 1;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    std::vector<Rational> next(coeff.size(), Rational(0));
    const BigInt a = distinct[i].size();
    for (std::size_t r = 0; r < coeff.size(); ++r) {
      if (coeff[r] == 0) continue;
      for (int n = 0; n <= mult[i] && r + static_cast<std::size_t>(n) < coeff.size(); ++n) {
        next[r + static_cast<std::size_t>(n)] += coeff[r] * Rational(pow_int(a, n), factorial(static_cast<unsigned>(n)));
      }
    }
    coeff = std::move(next);
  }
  const int start = static_cast<int>(ceil(zeta * p));
  Rational total = 0;
  const BigInt pw = BigInt(p) * w;
  for (int omega = std::max(start, 0); omega <= p; ++omega) {
    total += Rational(pow_int(pw, omega), factorial(static_cast<unsigned>(omega))) *
             coeff[static_cast<std::size_t>(p - omega)];
  }
  return 2 * total;
}

// ---------------------------------------------------------------------------
// Bombieri

namespace {

struct BestIntersection {
  std::vector<std::size_t> indices;
  Set intersection;
  bool exhaustive = false;
};

constexpr std::uint64_t kExhaustiveChoices = 1'000'000;

void dfs_intersections(const std::vector<Set>& sets, std::size_t t, std::size_t start, std::vector<std::size_t>& chosen,
                       const Set& cur, BestIntersection& best, bool& have) {
  if (chosen.size() == t) {
    if (!have || cur.size() > best.intersection.size()) {
      best.indices = chosen;
      best.intersection = cur;
      have = true;
    }
    return;
  }
  const std::size_t need = t - chosen.size();
  for (std::size_t i = start; i + need <= sets.size(); ++i) {
    chosen.push_back(i);
    dfs_intersections(sets, t, i + 1, chosen, chosen.size() == 1 ? sets[i] : set_intersection(cur, sets[i]), best,
                      have);
    chosen.pop_back();
  }
}

BestIntersection best_intersection(const std::vector<Set>& sets, std::size_t t, std::uint64_t limit) {
  BestIntersection best;
  if (t == 0 || t > sets.size()) return best;
  if (binomial(static_cast<unsigned>(sets.size()), static_cast<unsigned>(t)) <= limit) {
    best.exhaustive = true;
    std::vector<std::size_t> chosen;
    bool have = false;
    dfs_intersections(sets, t, 0, chosen, sets.front(), best, have);
    return best;
  }
  bool have = false;
  for (std::size_t start = 0; start < sets.size(); ++start) {
    std::vector<std::size_t> chosen{start};
    Set cur = sets[start];
    while (chosen.size() < t) {
      std::size_t pick = sets.size();
      std::size_t size = 0;
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
        const std::size_t s = intersection_size(cur, sets[j]);
        if (pick == sets.size() || s > size) {
          pick = j;
          size = s;
        }
      }
      chosen.push_back(pick);
      cur = set_intersection(cur, sets[pick]);
    }
    std::sort(chosen.begin(), chosen.end());
    if (!have || cur.size() > best.intersection.size() ||
        (cur.size() == best.intersection.size() && chosen < best.indices)) {
      best.indices = chosen;
      best.intersection = cur;
      have = true;
    }
  }
  return best;
}

}  // namespace

BombieriResult bombieri_intersection(const std::vector<Set>& sets, const Set& ground, const Rational& lambda,
                                     std::size_t t) {
  if (sets.empty()) throw PreconditionError("bombieri_intersection needs at least one set");
  if (lambda <= 0) throw PreconditionError("lambda must be positive");
  const std::size_t q = sets.size();
  for (const Set& b : sets) {
    if (!is_subset(b, ground)) throw PreconditionError("every B_i must lie inside B");
    if (Rational(BigInt(b.size())) < lambda * BigInt(ground.size())) {
      throw PreconditionError("some B_i is smaller than lambda |B|");
    }
  }
  if (t < 1 || Rational(BigInt(t)) > lambda * BigInt(q)) throw PreconditionError("need 1 <= t <= lambda q");
  const BestIntersection best = best_intersection(sets, t, kExhaustiveChoices);
  BombieriResult out;
  out.indices = best.indices;
  out.intersection = best.intersection;
  out.exhaustive = best.exhaustive;
  const BigInt choose = binomial(static_cast<unsigned>(q), static_cast<unsigned>(t));
  out.bound = (lambda - Rational(BigInt(t), BigInt(q))) * BigInt(ground.size()) / choose;
  if (out.exhaustive) out.bound_holds = Rational(BigInt(out.intersection.size())) >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Fibers

SumIndex::SumIndex(const Set& lambda, int d, std::uint64_t budget) : lambda_(lambda), d_(d) {
  if (d < 1) throw PreconditionError("SumIndex needs d >= 1");
  const std::size_t n = lambda.size();
  if (static_cast<std::size_t>(d) > n) return;
  if (binomial(static_cast<unsigned>(n), static_cast<unsigned>(d)) > budget) {
    throw BudgetExceeded("SumIndex: too many d-subsets");
  }
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Word sum = 0;
    for (int i : idx) sum ^= lambda[static_cast<std::size_t>(i)];
    table_.emplace_back(sum, idx);
    int pos = d - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == static_cast<int>(n) - d + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  std::stable_sort(table_.begin(), table_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < table_.size(); ++i) {
    if (table_[i].first == table_[i - 1].first) ambiguous_ = true;
  }
}

std::vector<int> SumIndex::decompose(Word x) const {
  const auto it = std::lower_bound(table_.begin(), table_.end(), x, [](const auto& e, Word v) { return e.first < v; });
  if (it == table_.end() || it->first != x) return {};
  return it->second;
}

FiberDecomposition decompose_fibers(const Set& q, const Set& lambda1, const Set& lambda2) {
  if (intersection_size(lambda1, lambda2) != 0) throw PreconditionError("Lambda1 and Lambda2 must be disjoint");
  FiberDecomposition fd;
  fd.lambda1 = lambda1;
  fd.lambda2 = lambda2;
  fd.s2 = lambda2.size();
  const Set all = set_union(lambda1, lambda2);
  const SumIndex index(all, 2);
  if (index.ambiguous()) throw PreconditionError("pair sums of Lambda1 u Lambda2 are not unique");
  std::vector<std::vector<Word>> fibers(lambda1.size());
  std::vector<Word> covered;
  for (Word x : q) {
    const std::vector<int> parts = index.decompose(x);
    if (parts.empty()) continue;
    const Word a = all[static_cast<std::size_t>(parts[0])];
    const Word b = all[static_cast<std::size_t>(parts[1])];
    std::ptrdiff_t i1 = lambda1.index_of(a);
    Word other = b;
    if (i1 < 0) {
      i1 = lambda1.index_of(b);
      other = a;
    }
    if (i1 < 0 || !lambda2.contains(other)) continue;
    fibers[static_cast<std::size_t>(i1)].push_back(other);
    covered.push_back(x);
  }
  for (auto& f : fibers) {
    fd.fibers.emplace_back(q.dim(), std::move(f));
    if (!fd.fibers.back().empty()) ++fd.s1;
  }
  fd.covered = Set(q.dim(), std::move(covered));
  return fd;
}

bool check_fiber_invariants(const FiberDecomposition& fd, int max_x) {
  std::size_t total = 0;
  for (const Set& f : fd.fibers) total += f.size();
  if (total != fd.covered.size()) return false;
  for (std::size_t i = 0; i < fd.fibers.size(); ++i) {
    for (Word y : fd.fibers[i]) {
      if (!fd.covered.contains(fd.lambda1[i] ^ y)) return false;
    }
  }
  for (int x = 1; x <= max_x; ++x) {
    BigInt lhs = 0;
    for (const Set& f : fd.fibers) lhs += pow_int(BigInt(f.size()), x);
    if (lhs > pow_int(BigInt(fd.s2), x - 1) * fd.covered.size()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fiber-sum bound

namespace {

// Rational lower / upper bounds for delta^{4 delta} with delta = a/64.
Interval x_bounds(const BigInt& a) {
  const Rational x16(pow_int(a, static_cast<int>(a)), BigInt(1) << static_cast<unsigned>(6 * a));
  constexpr unsigned kScale = 64;
  const Rational scaled = x16 * (BigInt(1) << (16 * kScale));
  const BigInt lo_root = iroot_floor(floor(scaled), 16);
  const BigInt hi_root = iroot_floor(ceil(scaled), 16) + 1;
  const BigInt unit = BigInt(1) << kScale;
  return {Rational(lo_root, unit), Rational(hi_root, unit)};
}

Rational rhs_main(int p, std::size_t s2, const std::vector<BigInt>& sums, const Rational& delta, const Rational& x) {
  const BigInt cd = ceil(delta);
  const int start = std::max(0, p - static_cast<int>(cd));
  Rational inner = 0;
  const BigInt ps2 = BigInt(p) * s2;
  for (int r = start; r <= p; ++r) {
    if (static_cast<std::size_t>(r) >= sums.size()) continue;
    inner += Rational(sums[static_cast<std::size_t>(r)], pow_int(ps2, r));
  }
  return Rational(BigInt(1) << (5 * p)) * x * pow_int(BigInt(p), 3 * p) * pow_int(BigInt(s2), p) * inner;
}

}  // namespace

Inverse2Report inverse2_bound(const FiberDecomposition& decomp, int p, const Rational& m) {
  if (p < 5) throw PreconditionError("the fiber-sum bound is stated for p >= 5");
  if (p > 6) throw BudgetExceeded("inverse2_bound: p above 6");
  if (decomp.s1 > 14) throw BudgetExceeded("inverse2_bound: more than 14 nonempty fibers");
  if (m <= 0) throw PreconditionError("M must be positive");
  Inverse2Report rep;
  rep.p = p;
  rep.m = m;
  rep.q_size = decomp.covered.size();
  rep.s1 = decomp.s1;
  rep.s2 = decomp.s2;
  const BigInt qs = rep.q_size;
  const BigInt s2p = BigInt(rep.s2) * p;

  std::vector<const Set*> fibers;
  for (const Set& f : decomp.fibers) {
    if (!f.empty()) fibers.push_back(&f);
  }
  const std::size_t s1 = fibers.size();
  std::vector<std::vector<std::uint64_t>> inter(s1, std::vector<std::uint64_t>(s1));
  for (std::size_t a = 0; a < s1; ++a) {
    for (std::size_t b = 0; b < s1; ++b) inter[a][b] = intersection_size(*fibers[a], *fibers[b]);
  }
  rep.support_sums.assign(s1 + 1, BigInt(0));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s1); ++mask) {
    BigInt prod = 1;
    for (std::uint64_t x = mask; x != 0; x &= x - 1) {
      const auto a = static_cast<std::size_t>(__builtin_ctzll(x));
      std::uint64_t row = 0;
      for (std::uint64_t y = mask; y != 0; y &= y - 1) row += inter[a][static_cast<std::size_t>(__builtin_ctzll(y))];
      prod *= row;
    }
    rep.support_sums[static_cast<std::size_t>(popcount64(mask))] += prod;
  }
  rep.lhs = energy_compressed(decomp.covered, p);
  rep.tail = Rational(pow_int(BigInt(p), 2 * p) * pow_int(qs, p)) / (2 * pow_rat(m, p));

  rep.hypothesis_holds = qs >= 2 * s2p && Rational(qs) >= Rational(BigInt(256) * s2p) * pow_rat(m, 8);
  if (!rep.hypothesis_holds) {
    rep.status = "hypothesis-not-met";
    return rep;
  }
  // log2(2eM) with e enclosed in [2.718281828, 2.718281829].
  const Rational e_lo(BigInt(2718281828), BigInt(1000000000));
  const Rational e_hi(BigInt(2718281829), BigInt(1000000000));
  const Interval num_lo = log2_bounds(2 * e_lo * m);
  const Interval num_hi = log2_bounds(2 * e_hi * m);
  const Interval dl = log2_bounds(Rational(qs, s2p));
  const Rational n_lo = num_lo.lo * p;
  const Rational n_hi = num_hi.hi * p;
  const Rational r_lo = n_lo >= 0 ? n_lo / dl.hi : n_lo / dl.lo;
  const Rational r_hi = n_hi >= 0 ? n_hi / dl.lo : n_hi / dl.hi;
  rep.delta0 = {std::max(r_lo, Rational(1)), std::max(r_hi, Rational(1))};
  const BigInt a_lo = std::max(floor(rep.delta0.lo * 64), BigInt(64));
  const BigInt a_hi = std::max(ceil(rep.delta0.hi * 64), BigInt(64));
  rep.delta0_lo = Rational(a_lo, 64);
  rep.delta0_hi = Rational(a_hi, 64);
  const Interval x_lo = x_bounds(a_lo);
  const Interval x_hi = x_bounds(a_hi);
  rep.rhs_lo = rhs_main(p, rep.s2, rep.support_sums, rep.delta0_lo, std::max(x_lo.lo, Rational(1))) + rep.tail;
  rep.rhs_hi = rhs_main(p, rep.s2, rep.support_sums, rep.delta0_hi, x_hi.hi) + rep.tail;
  const Rational lhs(rep.lhs);
  if (lhs <= rep.rhs_lo) {
    rep.verdict = Verdict::kHolds;
  } else if (lhs > rep.rhs_hi) {
    rep.verdict = Verdict::kViolated;
  } else {
    rep.verdict = Verdict::kUndecided;
  }
  rep.status = std::string(to_string(rep.verdict));
  rep.slack = rep.lhs == 0 ? std::numeric_limits<double>::infinity() : to_double(rep.rhs_lo / lhs);
  return rep;
}

// ---------------------------------------------------------------------------
// Rectangles

Set Rectangle::sum_set() const {
  Word shift = 0;
  for (Word w : prefix) shift ^= w;
  return translate(sumset(l, lp), shift);
}

void InverseParams::validate() const {
  if (p < 1) throw PreconditionError("p must be positive");
  if (k <= 0) throw PreconditionError("K must be positive");
  if (eta <= 0 || eta > Rational(1, 2)) throw PreconditionError("eta must lie in (0, 1/2]");
  if (epsilon && (*epsilon <= 0 || *epsilon > 1)) throw PreconditionError("epsilon must lie in (0, 1]");
  if (zeta && (*zeta < 0 || *zeta > 1)) throw PreconditionError("zeta must lie in [0, 1]");
  if (w && *w < 1) throw PreconditionError("w must be positive");
  if (t && *t < 1) throw PreconditionError("t must be positive");
  if (rounds < 1 || split_trials < 1 || candidates_per_pivot < 1 || restarts < 1) {
    throw PreconditionError("rounds, split_trials, candidates_per_pivot and restarts must be positive");
  }
  if (min_side < 1) throw PreconditionError("min_side must be positive");
  connect.validate();
}

bool rectangles_valid(const std::vector<Rectangle>& rects, const Set& q) {
  std::vector<Set> sums;
  for (const Rectangle& r : rects) {
    if (intersection_size(r.l, r.lp) != 0) return false;
    for (Word w : r.prefix) {
      if (r.l.contains(w) || r.lp.contains(w)) return false;
    }
    Set s = r.sum_set();
    if (s.size() != r.l.size() * r.lp.size()) return false;
    if (!is_subset(s, q)) return false;
    for (const Set& other : sums) {
      if (intersection_size(other, s) != 0) return false;
    }
    sums.push_back(std::move(s));
  }
  return true;
}

namespace {

using Mask = std::uint64_t;

// Graph on Lambda: vertex i adjacent to j when lambda_i + lambda_j lies in the set.
std::vector<Mask> adjacency(const Set& s, const Set& lambda, const SumIndex& index) {
  std::vector<Mask> adj(lambda.size(), 0);
  for (Word x : s) {
    const std::vector<int> parts = index.decompose(x);
    if (parts.size() != 2) continue;
    adj[static_cast<std::size_t>(parts[0])] |= Mask{1} << parts[1];
    adj[static_cast<std::size_t>(parts[1])] |= Mask{1} << parts[0];
  }
  return adj;
}

std::size_t cross_edges(const std::vector<Mask>& adj, Mask side1, std::size_t n) {
  const Mask all = n == 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
  const Mask side2 = all & ~side1;
  std::size_t total = 0;
  for (Mask x = side1; x != 0; x &= x - 1) total += static_cast<std::size_t>(popcount64(adj[static_cast<std::size_t>(__builtin_ctzll(x))] & side2));
  return total;
}

// Best balanced split by random starts and best-improvement swaps.
Mask best_split(const std::vector<Mask>& adj, std::size_t n, int trials, Rng& rng, std::size_t* mass) {
  const std::size_t a = (n + 1) / 2;
  Mask best = 0;
  std::size_t best_mass = 0;
  bool have = false;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < trials; ++trial) {
    shuffle(order.begin(), order.end(), rng);
    Mask side = 0;
    for (std::size_t i = 0; i < a; ++i) side |= Mask{1} << order[i];
    std::size_t cur = cross_edges(adj, side, n);
    while (true) {
      std::size_t top = cur;
      Mask top_side = side;
      for (Mask x = side; x != 0; x &= x - 1) {
        const Mask u = x & (~x + 1);
        for (std::size_t v = 0; v < n; ++v) {
          if ((side >> v) & 1U) continue;
          const Mask trial_side = (side & ~u) | (Mask{1} << v);
          const std::size_t m = cross_edges(adj, trial_side, n);
          if (m > top) {
            top = m;
            top_side = trial_side;
          }
        }
      }
      if (top == cur) break;
      cur = top;
      side = top_side;
    }
    if (!have || cur > best_mass) {
      best = side;
      best_mass = cur;
      have = true;
    }
  }
  *mass = best_mass;
  return best;
}

Set subset_by_mask(const Set& lambda, Mask m) {
  std::vector<Word> out;
  for (Mask x = m; x != 0; x &= x - 1) out.push_back(lambda[static_cast<std::size_t>(__builtin_ctzll(x))]);
  return Set(lambda.dim(), std::move(out));
}

Mask mask_of(const Set& sub, const Set& lambda) {
  Mask m = 0;
  for (Word w : sub) m |= Mask{1} << lambda.index_of(w);
  return m;
}

// Default epsilon = 1 / (16 K_1), K_1 = ceil(2^13 K* X^{1/p}) with X from delta0.
Rational default_epsilon(const InverseParams& params, std::size_t m3, std::size_t s2) {
  const double kstar = std::max(1.0, to_double(params.k));
  const double mm = 128.0 * to_double(params.k);
  const int p = params.p;
  double delta0 = p;
  const double ratio = static_cast<double>(m3) / (static_cast<double>(s2) * p);
  if (ratio > 1.0) delta0 = std::max(p * std::log2(2.0 * std::exp(1.0) * mm) / std::log2(ratio), 1.0);
  const double xroot = std::pow(delta0, 4.0 * delta0 / p);
  const double k1 = std::ceil(8192.0 * kstar * xroot);
  if (!(k1 < 1e15)) return Rational(BigInt(1), BigInt(1) << 50);
  return Rational(BigInt(1), BigInt(16) * BigInt(static_cast<std::uint64_t>(k1)));
}

// Ranking of rectangle candidates: shorter side first then area, or area alone.
std::pair<int, int> rect_key(const std::pair<Mask, Mask>& r, bool balanced) {
  const int a = popcount64(r.first);
  const int b = popcount64(r.second);
  return balanced ? std::make_pair(std::min(a, b), a * b) : std::make_pair(a * b, std::min(a, b));
}

// Rectangle candidates grown from a seed by alternately taking common
// neighbourhoods inside the working set; keeps the largest with both sides
// at least min_side.
std::optional<std::pair<Mask, Mask>> close_rectangle(const std::vector<Mask>& adj, std::size_t n, Mask l, Mask lp,
                                                     int min_side, bool balanced) {
  std::optional<std::pair<Mask, Mask>> best;
  auto offer = [&](Mask a, Mask b) {
    if ((a & b) != 0) return;
    const int sa = popcount64(a);
    const int sb = popcount64(b);
    if (sa < min_side || sb < min_side) return;
    if (!best || rect_key({a, b}, balanced) > rect_key(*best, balanced)) best = std::make_pair(a, b);
  };
  auto common = [&](Mask side) {
    Mask out = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if ((side >> v) & 1U) continue;
      if ((adj[v] & side) == side) out |= Mask{1} << v;
    }
    return out;
  };
  offer(l, lp);
  for (int iter = 0; iter < 8; ++iter) {
    const Mask l2 = common(lp);
    offer(l2, lp);
    const Mask lp2 = common(l2);
    offer(l2, lp2);
    if (l2 == l && lp2 == lp) break;
    l = l2;
    lp = lp2;
    if (l == 0 || lp == 0) break;
  }
  return best;
}

void remove_rectangle(std::vector<Mask>& adj, const std::pair<Mask, Mask>& r) {
  for (Mask x = r.first; x != 0; x &= x - 1) adj[static_cast<std::size_t>(__builtin_ctzll(x))] &= ~r.second;
  for (Mask x = r.second; x != 0; x &= x - 1) adj[static_cast<std::size_t>(__builtin_ctzll(x))] &= ~r.first;
}

// Elements covered by repeatedly taking the best neighbourhood-seeded rectangle.
std::size_t greedy_rollout(std::vector<Mask> adj, std::size_t n, int min_side, bool balanced) {
  std::size_t total = 0;
  while (true) {
    std::optional<std::pair<Mask, Mask>> best;
    for (std::size_t v = 0; v < n; ++v) {
      if (popcount64(adj[v]) < min_side) continue;
      const auto cand = close_rectangle(adj, n, Mask{1} << v, adj[v], min_side, balanced);
      if (cand && (!best || rect_key(*cand, balanced) > rect_key(*best, balanced))) best = cand;
    }
    if (!best) return total;
    total += static_cast<std::size_t>(popcount64(best->first) * popcount64(best->second));
    remove_rectangle(adj, *best);
  }
}

}  // namespace

ExtractionResult extract_rectangles_pair(const Set& q, const Set& lambda, const InverseParams& params) {
  params.validate();
  if (lambda.size() > 64) throw PreconditionError("extraction supports |Lambda| <= 64");
  if (q.dim() != lambda.dim()) throw DimensionError("Q and Lambda dimensions differ");
  const FamilyStatus family = in_family(lambda, FamilySpec::plain(lambda.dim(), 4 * params.p));
  if (family == FamilyStatus::kFalse) throw PreconditionError("Lambda is not in Lambda(4p)");
  std::vector<std::string> warnings;
  if (family == FamilyStatus::kUndecided) warnings.push_back("Lambda(4p) membership undecided");
  const SumIndex index(lambda, 2);
  for (Word x : q) {
    if (index.decompose(x).empty()) throw PreconditionError("Q has an element outside the 2-fold distinct sumset");
  }
  const std::size_t n = lambda.size();

  // One greedy pass; restarts differ in seed and candidate ranking.
  auto run = [&](std::uint64_t seed, int policy) {
  ExtractionResult out;
  Rng rng(seed);
  Set remaining = q;

  for (int round = 0; round < params.rounds; ++round) {
    // policy 0 / 1: fixed ranking; 2: ranking drawn per round.
    const bool balanced = policy == 2 ? uniform_below(rng, 2) == 0 : policy == 0;
    ExtractionRound tr;
    tr.working_size = remaining.size();
    const std::size_t min_area = static_cast<std::size_t>(params.min_side) * static_cast<std::size_t>(params.min_side);
    if (remaining.size() < min_area) {
      tr.note = "working set smaller than a minimal rectangle";
      out.trace.push_back(std::move(tr));
      break;
    }
    // (1) connectedness refinement
    Set q1 = remaining;
    if (remaining.size() > 2) {
      ConnectednessParams cp = params.connect;
      cp.seed = params.connect.seed + static_cast<std::uint64_t>(round);
      const ConnectednessResult cr = refine_connected(remaining, cp);
      q1 = cr.refined;
      tr.refine_status = cr.status;
      tr.refine_steps = cr.trace.size();
    }
    tr.refined_size = q1.size();
    // (2) split
    const std::vector<Mask> adj1 = adjacency(q1, lambda, index);
    std::size_t mass = 0;
    const Mask side = best_split(adj1, n, params.split_trials, rng, &mass);
    tr.cross_mass = mass;
    tr.split_guarantee = 2 * mass >= q1.size();
    const Set lambda1 = subset_by_mask(lambda, side);
    const Set lambda2 = set_difference(lambda, lambda1);
    // (3) fibers of Q2, then Q3 from the heaviest fibers
    const FiberDecomposition fd2 = decompose_fibers(q1, lambda1, lambda2);
    const std::size_t target = (q1.size() + 1) / 2;
    std::vector<std::size_t> by_size(fd2.fibers.size());
    std::iota(by_size.begin(), by_size.end(), 0);
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return fd2.fibers[a].size() > fd2.fibers[b].size(); });
    std::vector<Word> q3w;
    for (std::size_t i : by_size) {
      for (Word y : fd2.fibers[i]) {
        if (q3w.size() >= target) break;
        q3w.push_back(lambda1[i] ^ y);
      }
    }
    const Set q3(q.dim(), std::move(q3w));
    const FiberDecomposition fd = decompose_fibers(q3, lambda1, lambda2);
    tr.q3_size = q3.size();
    tr.s1 = fd.s1;
    tr.s2 = fd.s2;
    if (fd.s1 == 0) {
      tr.note = "no fibers across the split";
      out.trace.push_back(std::move(tr));
      break;
    }
    // (4) dyadic buckets
    for (const Set& f : fd.fibers) {
      if (f.empty()) continue;
      std::size_t j = 1;
      while ((std::size_t{1} << j) < f.size()) ++j;
      if (tr.bucket_sizes.size() < j) tr.bucket_sizes.resize(j, 0);
      ++tr.bucket_sizes[j - 1];
    }
    // (5) thresholds and candidate supports
    const Rational eps = params.epsilon ? *params.epsilon : default_epsilon(params, fd.covered.size(), fd.s2);
    const Rational zeta = params.zeta ? *params.zeta : eps / 2;
    tr.epsilon = eps;
    tr.zeta = zeta;
    tr.epsilon_condition = eps * params.eta * params.p >= 16;
    const int p1 = std::min<int>(params.p, static_cast<int>(fd.s1));
    const Rational m3_over_s2(BigInt(fd.covered.size()), BigInt(fd.s2));
    std::vector<int> nonempty;
    for (std::size_t i = 0; i < fd.fibers.size(); ++i) {
      if (!fd.fibers[i].empty()) nonempty.push_back(static_cast<int>(i));
    }
    auto g_set = [&](const std::vector<int>& s, int alpha) {
      std::vector<Word> g;
      for (Word x : fd.fibers[static_cast<std::size_t>(alpha)]) {
        int count = 0;
        for (int beta : s) count += fd.fibers[static_cast<std::size_t>(beta)].contains(x) ? 1 : 0;
        if (Rational(count) >= eps * p1) g.push_back(x);
      }
      return Set(q.dim(), std::move(g));
    };
    struct PivotCandidates {
      int alpha = -1;
      std::vector<std::vector<int>> supports;
    };
    std::vector<PivotCandidates> pivots;
    std::vector<int> pivot_order = nonempty;
    std::stable_sort(pivot_order.begin(), pivot_order.end(), [&](int a, int b) {
      return fd.fibers[static_cast<std::size_t>(a)].size() > fd.fibers[static_cast<std::size_t>(b)].size();
    });
    for (int alpha : pivot_order) {
      const Set& da = fd.fibers[static_cast<std::size_t>(alpha)];
      PivotCandidates pc;
      pc.alpha = alpha;
      if (Rational(BigInt(da.size())) < eps * m3_over_s2) {
        pivots.push_back(std::move(pc));
        continue;
      }
      std::vector<int> others;
      for (int b : nonempty) {
        if (b != alpha) others.push_back(b);
      }
      std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
        return intersection_size(da, fd.fibers[static_cast<std::size_t>(a)]) >
               intersection_size(da, fd.fibers[static_cast<std::size_t>(b)]);
      });
      std::vector<int> pool;
      for (int b : others) {
        if (intersection_size(da, fd.fibers[static_cast<std::size_t>(b)]) > 0) pool.push_back(b);
      }
      if (static_cast<int>(pool.size()) < p1 - 1) pool = others;
      std::set<std::vector<int>> seen;
      auto add_support = [&](std::vector<int> s) {
        std::sort(s.begin(), s.end());
        if (!seen.insert(s).second) return;
        const Set g = g_set(s, alpha);
        if (Rational(BigInt(g.size())) >= eps * BigInt(da.size())) pc.supports.push_back(std::move(s));
      };
      std::vector<int> first{alpha};
      first.insert(first.end(), others.begin(), others.begin() + (p1 - 1));
      add_support(first);
      for (int c = 1; c < params.candidates_per_pivot; ++c) {
        std::vector<int> draw = pool;
        shuffle(draw.begin(), draw.end(), rng);
        std::vector<int> s{alpha};
        s.insert(s.end(), draw.begin(), draw.begin() + (p1 - 1));
        add_support(std::move(s));
      }
      pivots.push_back(std::move(pc));
    }
    std::stable_sort(pivots.begin(), pivots.end(),
                     [](const PivotCandidates& a, const PivotCandidates& b) { return a.supports.size() > b.supports.size(); });

    std::optional<std::pair<Mask, Mask>> found;
    std::vector<std::pair<Mask, Mask>> pool;
    const std::vector<Mask> adj_w = adjacency(remaining, lambda, index);
    for (const PivotCandidates& pc : pivots) {
      if (pc.supports.empty()) break;
      const int alpha = pc.alpha;
      const Set& da = fd.fibers[static_cast<std::size_t>(alpha)];
      // (6) greedy near-disjoint supports
      int w = 1;
      if (params.w) {
        w = *params.w;
      } else {
        const double e = to_double(eps);
        const double ratio = to_double(m3_over_s2);
        const double raw = ratio > 1.0 ? std::log2(ratio) / (e * e * p1 * std::log2(64.0 / (e * e))) : 0.0;
        w = raw >= static_cast<double>(pc.supports.size()) ? static_cast<int>(pc.supports.size())
                                                            : std::max(1, static_cast<int>(raw));
      }
      const GreedyResult gr = greedy_disjoint_supports(pc.supports, zeta, w);
      // (7) Bombieri on the heavy-overlap sets
      std::vector<Set> gs;
      Rational lam = 1;
      for (std::size_t i : gr.indices) {
        gs.push_back(g_set(pc.supports[i], alpha));
        lam = std::min(lam, Rational(BigInt(gs.back().size()), BigInt(da.size())));
      }
      int t = params.t ? *params.t : std::max(1, static_cast<int>(floor(eps * static_cast<int>(gs.size()) / 2)));
      const int t_cap = static_cast<int>(floor(lam * static_cast<int>(gs.size())));
      t = std::min(t, t_cap);
      Set gstar = gs.front();
      if (t >= 1) gstar = bombieri_intersection(gs, da, lam, static_cast<std::size_t>(t)).intersection;
      std::set<int> e_set;
      for (std::size_t i : gr.indices) e_set.insert(pc.supports[i].begin(), pc.supports[i].end());
      std::vector<int> e_list(e_set.begin(), e_set.end());
      std::vector<Set> e_fibers;
      for (int b : e_list) e_fibers.push_back(set_intersection(fd.fibers[static_cast<std::size_t>(b)], gstar));
      const int l_floor = static_cast<int>(floor(eps * p1 * std::max(t, 1) / 4));
      const std::size_t l = std::min<std::size_t>(e_list.size(), static_cast<std::size_t>(std::max(2, l_floor)));
      const BestIntersection bi = best_intersection(e_fibers, l, 100'000);
      if (bi.indices.empty()) continue;
      Mask seed_l = 0;
      Set inter = fd.fibers[static_cast<std::size_t>(e_list[bi.indices.front()])];
      for (std::size_t i : bi.indices) {
        const int r = e_list[i];
        seed_l |= Mask{1} << lambda.index_of(lambda1[static_cast<std::size_t>(r)]);
        inter = set_intersection(inter, fd.fibers[static_cast<std::size_t>(r)]);
      }
      if (inter.empty()) continue;
      const Mask seed_lp = mask_of(inter, lambda);
      // (8) closure inside the working set
      const auto cand = close_rectangle(adj_w, n, seed_l, seed_lp, params.min_side, balanced);
      if (!cand) continue;
      pool.push_back(*cand);
      if (found && !(rect_key(*cand, balanced) > rect_key(*found, balanced))) continue;
      found = cand;
      tr.pivot = alpha;
      tr.supports = pc.supports.size();
      tr.greedy_selected = gr.indices.size();
      tr.w = w;
      tr.t = t;
      tr.seed_l = static_cast<std::size_t>(popcount64(seed_l));
      tr.seed_lp = inter.size();
    }
    // Neighbourhood seeds: L' = N(v), grown by the same closure.
    for (std::size_t v = 0; v < n; ++v) {
      if (popcount64(adj_w[v]) < params.min_side) continue;
      const auto cand = close_rectangle(adj_w, n, Mask{1} << v, adj_w[v], params.min_side, balanced);
      if (cand) pool.push_back(*cand);
      if (cand && (!found || rect_key(*cand, balanced) > rect_key(*found, balanced))) {
        found = cand;
        tr.note = "neighbourhood seed";
      }
    }
    if (params.lookahead && pool.size() > 1) {
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      std::size_t best_score = 0;
      for (const auto& cand : pool) {
        std::vector<Mask> adj = adj_w;
        remove_rectangle(adj, cand);
        const std::size_t score = static_cast<std::size_t>(popcount64(cand.first) * popcount64(cand.second)) +
                                  greedy_rollout(adj, n, params.min_side, balanced);
        if (score > best_score || (score == best_score && rect_key(cand, balanced) > rect_key(*found, balanced))) {
          best_score = score;
          if (cand != *found) tr.note = "lookahead";
          found = cand;
        }
      }
    }
    if (!found) {
      tr.note = "no rectangle found";
      out.trace.push_back(std::move(tr));
      break;
    }
    Rectangle rect;
    rect.l = subset_by_mask(lambda, found->first);
    rect.lp = subset_by_mask(lambda, found->second);
    if (words_of(rect.lp) < words_of(rect.l)) std::swap(rect.l, rect.lp);
    const Set sums = rect.sum_set();
    remaining = set_difference(remaining, sums);
    tr.emitted = rect;
    out.rectangles.push_back(std::move(rect));
    out.trace.push_back(std::move(tr));
  }

  out.containment_ok = true;
  out.disjointness_ok = true;
  std::vector<Set> sums;
  for (const Rectangle& r : out.rectangles) {
    Set s = r.sum_set();
    if (intersection_size(r.l, r.lp) != 0 || !is_subset(s, q)) out.containment_ok = false;
    for (const Set& other : sums) {
      if (intersection_size(other, s) != 0) out.disjointness_ok = false;
    }
    sums.push_back(std::move(s));
  }
  out.covered = q.size() - remaining.size();
  out.coverage = q.empty() ? 0.0 : static_cast<double>(out.covered) / static_cast<double>(q.size());
  return out;
  };

  ExtractionResult best;
  for (int r = 0; r < params.restarts; ++r) {
    ExtractionResult cur = run(params.seed + 7919 * static_cast<std::uint64_t>(r), std::min(r, 2));
    if (r == 0 || cur.covered > best.covered) best = std::move(cur);
  }
  best.family = family;
  best.warnings = std::move(warnings);
  return best;
}

namespace {

const Rectangle* largest(const std::vector<Rectangle>& rects) {
  const Rectangle* best = nullptr;
  for (const Rectangle& r : rects) {
    if (best == nullptr || r.l.size() * r.lp.size() > best->l.size() * best->lp.size()) best = &r;
  }
  return best;
}

}  // namespace

DExtractionResult extract_rectangles_d(const Set& q, const Set& lambda, int d, const InverseParams& params) {
  params.validate();
  if (d < 2) throw PreconditionError("extract_rectangles_d needs d >= 2");
  DExtractionResult out;
  if (d == 2) {
    ExtractionResult pair = extract_rectangles_pair(q, lambda, params);
    out.family = pair.family;
    out.warnings = pair.warnings;
    if (const Rectangle* r = largest(pair.rectangles)) out.rectangle = *r;
    out.containment_ok = pair.containment_ok;
    out.pair = std::move(pair);
    return out;
  }
  if (lambda.size() > 64) throw PreconditionError("extraction supports |Lambda| <= 64");
  if (q.dim() != lambda.dim()) throw DimensionError("Q and Lambda dimensions differ");
  out.family = in_family(lambda, FamilySpec::plain(lambda.dim(), 2 * d * params.p));
  if (out.family == FamilyStatus::kFalse) throw PreconditionError("Lambda is not in Lambda(2dp)");
  if (out.family == FamilyStatus::kUndecided) out.warnings.push_back("Lambda(2dp) membership undecided");
  const std::size_t n = lambda.size();
  const std::size_t a = (n + static_cast<std::size_t>(d) - 1) / static_cast<std::size_t>(d);
  if (n <= a * static_cast<std::size_t>(d - 1)) throw PreconditionError("Lambda too small for d nonempty parts");
  const SumIndex index(lambda, d);
  std::vector<std::vector<int>> parts_of;
  for (Word x : q) {
    std::vector<int> p = index.decompose(x);
    if (p.empty()) throw PreconditionError("Q has an element outside the d-fold distinct sumset");
    parts_of.push_back(std::move(p));
  }
  // (1) connectedness refinement
  std::vector<std::size_t> active(q.size());
  std::iota(active.begin(), active.end(), 0);
  if (q.size() > 2) {
    ConnectednessParams cp = params.connect;
    cp.d = d;
    const Set refined = refine_connected(q, cp).refined;
    active.clear();
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (refined.contains(q[i])) active.push_back(i);
    }
  }
  // (2) partition of Lambda into d parts maximizing the number of elements
  // with one summand in each part
  Rng rng(params.seed);
  auto mass_of = [&](const std::vector<int>& label) {
    std::size_t m = 0;
    for (std::size_t i : active) {
      Mask seen = 0;
      for (int v : parts_of[i]) seen |= Mask{1} << label[static_cast<std::size_t>(v)];
      if (popcount64(seen) == d) ++m;
    }
    return m;
  };
  std::vector<int> best_label;
  std::size_t best_mass = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < params.split_trials; ++trial) {
    shuffle(order.begin(), order.end(), rng);
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) label[order[i]] = static_cast<int>(std::min(i / a, static_cast<std::size_t>(d - 1)));
    std::size_t cur = mass_of(label);
    while (true) {
      std::size_t top = cur;
      std::pair<std::size_t, std::size_t> swap_pair{n, n};
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
          if (label[u] == label[v]) continue;
          std::swap(label[u], label[v]);
          const std::size_t m = mass_of(label);
          std::swap(label[u], label[v]);
          if (m > top) {
            top = m;
            swap_pair = {u, v};
          }
        }
      }
      if (top == cur) break;
      std::swap(label[swap_pair.first], label[swap_pair.second]);
      cur = top;
    }
    if (best_label.empty() || cur > best_mass) {
      best_label = label;
      best_mass = cur;
    }
  }
  out.partition_mass = best_mass;
  // (3) prefix pigeonhole: choose the two pair parts and the prefix with the
  // largest fiber whose energy excess persists
  const Rational mm = Rational(8192) * pow_rat(8 * params.k, d - 1);
  struct Choice {
    int pa = 0;
    int pb = 0;
    std::vector<int> prefix;  // summand positions outside parts pa, pb, ascending
    std::vector<std::size_t> members;
  };
  std::vector<Choice> choices;
  for (int pa = 0; pa < d; ++pa) {
    for (int pb = pa + 1; pb < d; ++pb) {
      std::map<std::vector<int>, std::vector<std::size_t>> groups;
      for (std::size_t i : active) {
        Mask seen = 0;
        std::vector<int> pre;
        for (int v : parts_of[i]) {
          const int lab = best_label[static_cast<std::size_t>(v)];
          seen |= Mask{1} << lab;
          if (lab != pa && lab != pb) pre.push_back(v);
        }
        if (popcount64(seen) != d) continue;
        groups[pre].push_back(i);
      }
      for (auto& [pre, members] : groups) choices.push_back({pa, pb, pre, members});
    }
  }
  std::stable_sort(choices.begin(), choices.end(),
                   [](const Choice& x, const Choice& y) { return x.members.size() > y.members.size(); });
  const Choice* chosen = nullptr;
  for (const Choice& c : choices) {
    std::vector<Word> fiber;
    Word shift = 0;
    for (int v : c.prefix) shift ^= lambda[static_cast<std::size_t>(v)];
    for (std::size_t i : c.members) fiber.push_back(q[i] ^ shift);
    const Set fs(q.dim(), std::move(fiber));
    const BigInt tp = energy_compressed(fs, params.p);
    // excess: T_p(D(a)) > p^{2p} |D(a)|^p / M^p
    if (Rational(tp) * pow_rat(mm, params.p) > Rational(pow_int(BigInt(params.p), 2 * params.p) * pow_int(BigInt(fs.size()), params.p))) {
      chosen = &c;
      break;
    }
  }
  if (chosen == nullptr) {
    out.warnings.push_back("no prefix with energy excess");
    return out;
  }
  out.prefix_mass = chosen->members.size();
  std::vector<std::vector<Word>> part_words(static_cast<std::size_t>(d));
  for (std::size_t v = 0; v < n; ++v) part_words[static_cast<std::size_t>(best_label[v])].push_back(lambda[v]);
  for (int i = 0; i < d; ++i) {
    if (i != chosen->pa && i != chosen->pb) out.parts.emplace_back(q.dim(), part_words[static_cast<std::size_t>(i)]);
  }
  out.parts.emplace_back(q.dim(), part_words[static_cast<std::size_t>(chosen->pa)]);
  out.parts.emplace_back(q.dim(), part_words[static_cast<std::size_t>(chosen->pb)]);
  // (4) pair extraction on D(a) inside S_{d-1} + S_d
  Word shift = 0;
  std::vector<Word> prefix;
  for (int v : chosen->prefix) {
    shift ^= lambda[static_cast<std::size_t>(v)];
    prefix.push_back(lambda[static_cast<std::size_t>(v)]);
  }
  std::vector<Word> fiber;
  for (std::size_t i : chosen->members) fiber.push_back(q[i] ^ shift);
  const Set sub_lambda = set_union(out.parts[static_cast<std::size_t>(d - 2)], out.parts[static_cast<std::size_t>(d - 1)]);
  ExtractionResult pair = extract_rectangles_pair(Set(q.dim(), std::move(fiber)), sub_lambda, params);
  if (const Rectangle* r = largest(pair.rectangles)) {
    Rectangle rect = *r;
    rect.prefix = prefix;
    out.containment_ok = rectangles_valid({rect}, q);
    out.rectangle = std::move(rect);
  }
  out.pair = std::move(pair);
  return out;
}

// ---------------------------------------------------------------------------
// Planted instances

PlantedInstance plant_instance(const PlantParams& params) {
  if (params.h < 0 || params.lsize < 1 || params.lpsize < 1) throw PreconditionError("bad rectangle sizes");
  if (params.lsize + params.lpsize > params.lambda_size) throw PreconditionError("rectangle sides exceed |Lambda|");
  if (params.noise < 0) throw PreconditionError("noise must be nonnegative");
  PlantedInstance inst;
  inst.lambda = random_dissociated(params.n, params.lambda_size, params.seed);
  const std::size_t m = inst.lambda.size();
  Rng rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (int r = 0; r < params.h; ++r) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      shuffle(order.begin(), order.end(), rng);
      const auto ls = static_cast<std::size_t>(params.lsize);
      const auto lps = static_cast<std::size_t>(params.lpsize);
      std::set<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < ls; ++i) {
        for (std::size_t j = ls; j < ls + lps; ++j) pairs.insert(std::minmax(order[i], order[j]));
      }
      bool clash = false;
      for (const auto& pr : pairs) clash = clash || used.count(pr) != 0;
      if (clash) continue;
      used.insert(pairs.begin(), pairs.end());
      Rectangle rect;
      std::vector<Word> l;
      std::vector<Word> lp;
      for (std::size_t i = 0; i < ls; ++i) l.push_back(inst.lambda[order[i]]);
      for (std::size_t j = ls; j < ls + lps; ++j) lp.push_back(inst.lambda[order[j]]);
      rect.l = Set(params.n, std::move(l));
      rect.lp = Set(params.n, std::move(lp));
      inst.planted.push_back(std::move(rect));
      placed = true;
    }
    if (!placed) throw GenerationFailed("could not place disjoint planted rectangles");
  }
  std::vector<Word> planted;
  for (const auto& [i, j] : used) planted.push_back(inst.lambda[i] ^ inst.lambda[j]);
  inst.planted_union = Set(params.n, std::move(planted));
  const auto noise_count = static_cast<std::size_t>(floor(params.noise * BigInt(inst.planted_union.size())));
  std::vector<Word> free_pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (used.count({i, j}) == 0) free_pairs.push_back(inst.lambda[i] ^ inst.lambda[j]);
    }
  }
  if (free_pairs.size() < noise_count) throw GenerationFailed("not enough free pairs for the requested noise");
  shuffle(free_pairs.begin(), free_pairs.end(), rng);
  free_pairs.resize(noise_count);
  inst.noise = Set(params.n, std::move(free_pairs));
  inst.q = set_union(inst.planted_union, inst.noise);
  return inst;
}

double planted_coverage(const std::vector<Rectangle>& rects, const Set& planted) {
  if (planted.empty()) return 1.0;
  Set hit(planted.dim());
  for (const Rectangle& r : rects) hit = set_union(hit, set_intersection(r.sum_set(), planted));
  return static_cast<double>(hit.size()) / static_cast<double>(planted.size());
}

}  // namespace f2ac
