#include "f2ac/dissociation.hpp"

#include <algorithm>
#include <unordered_map>

#include "f2ac/numeric.hpp"

namespace f2ac {

bool Gf2Basis::insert(Word w) {
  w = reduce(w);
  if (w == 0) return false;
  const int top = 31 - __builtin_clz(w);
  pivot_[static_cast<std::size_t>(top)] = w;
  ++rank_;
  return true;
}

Word Gf2Basis::reduce(Word w) const {
  for (int b = 31; b >= 0 && w != 0; --b) {
    if (((w >> b) & 1U) != 0 && pivot_[static_cast<std::size_t>(b)] != 0) w ^= pivot_[static_cast<std::size_t>(b)];
  }
  return w;
}

int gf2_rank(std::span<const Word> words) {
  Gf2Basis basis;
  for (Word w : words) basis.insert(w);
  return basis.rank();
}

bool is_dissociated(const Set& l) { return gf2_rank(l.words()) == static_cast<int>(l.size()); }

std::string_view to_string(FamilyStatus s) {
  switch (s) {
    case FamilyStatus::kTrue:
      return "true";
    case FamilyStatus::kFalse:
      return "false";
    case FamilyStatus::kUndecided:
      return "undecided";
  }
  return "undecided";
}

void FamilySpec::validate(int dim) const {
  if (k < 1) throw PreconditionError("family weight k must be positive");
  if (r.dim() != dim) throw DimensionError("family set R has the wrong dimension");
  if (!r.contains(Word{0})) throw PreconditionError("family set R must contain 0");
}

FamilyStatus in_family(const Set& l, const FamilySpec& spec, std::uint64_t budget) {
  spec.validate(l.dim());
  if (spec.r.size() == 1 && static_cast<std::size_t>(spec.k) >= l.size()) {
    return is_dissociated(l) ? FamilyStatus::kTrue : FamilyStatus::kFalse;
  }
  return in_family_mitm(l, spec, budget);
}

namespace {

// Two distinct subsets per XOR value are enough to find one differing from
// any probe subset.
struct Bucket {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  int count = 0;
};

template <class Visit>
void for_each_subset(const Set& l, int max_size, Visit&& visit) {
  const int m = static_cast<int>(l.size());
  auto rec = [&](auto&& self, int start, int size, std::uint64_t mask, Word sum) -> void {
    visit(mask, sum);
    if (size == max_size) return;
    for (int i = start; i < m; ++i) self(self, i + 1, size + 1, mask | (std::uint64_t{1} << i), sum ^ l[static_cast<std::size_t>(i)]);
  };
  rec(rec, 0, 0, 0, 0);
}

BigInt subsets_up_to(std::size_t m, int size) {
  BigInt total = 0;
  for (int j = 0; j <= size && static_cast<std::size_t>(j) <= m; ++j) total += binomial(static_cast<unsigned>(m), static_cast<unsigned>(j));
  return total;
}

}  // namespace

FamilyStatus in_family_mitm(const Set& l, const FamilySpec& spec, std::uint64_t budget) {
  spec.validate(l.dim());
  if (l.size() > 64) throw PreconditionError("in_family_mitm supports at most 64 elements");
  const int m = static_cast<int>(l.size());
  const int k = std::min(spec.k, m);
  if (m == 0) return FamilyStatus::kTrue;
  const int small = k / 2;
  const int large = k - small;
  if (subsets_up_to(l.size(), large) + subsets_up_to(l.size(), small) > budget) return FamilyStatus::kUndecided;

  std::unordered_map<Word, Bucket> table;
  for_each_subset(l, small, [&](std::uint64_t mask, Word sum) {
    Bucket& b = table[sum];
    if (b.count == 0) {
      b.first = mask;
    } else if (b.count == 1) {
      b.second = mask;
    }
    ++b.count;
  });

  bool found = false;
  for_each_subset(l, large, [&](std::uint64_t mask, Word sum) {
    if (found) return;
    for (Word target : spec.r) {
      const auto it = table.find(sum ^ target);
      if (it == table.end()) continue;
      const Bucket& b = it->second;
      if (b.first != mask || b.count > 1) {
        found = true;
        return;
      }
    }
  });
  return found ? FamilyStatus::kFalse : FamilyStatus::kTrue;
}

Set random_dissociated(int n, int m, const FamilySpec& spec, std::uint64_t seed, std::uint64_t max_draws) {
  check_dim(n);
  spec.validate(n);
  if (m < 0) throw PreconditionError("random_dissociated: negative size");
  const bool plain = spec.r.size() == 1 && spec.k >= m;
  if (plain && m > n) throw PreconditionError("a dissociated subset of F_2^n has at most n elements");
  if (max_draws == 0) max_draws = 1000 * static_cast<std::uint64_t>(m + 1);
  Rng rng(seed);
  std::vector<Word> chosen;
  Gf2Basis basis;
  const std::uint64_t space = std::uint64_t{1} << n;
  for (std::uint64_t draw = 0; draw < max_draws && static_cast<int>(chosen.size()) < m; ++draw) {
    const auto w = static_cast<Word>(1 + uniform_below(rng, space - 1));
    if (plain) {
      if (basis.insert(w)) chosen.push_back(w);
      continue;
    }
    if (std::find(chosen.begin(), chosen.end(), w) != chosen.end()) continue;
    std::vector<Word> trial = chosen;
    trial.push_back(w);
    if (in_family(Set(n, trial), spec) == FamilyStatus::kTrue) chosen = std::move(trial);
  }
  if (static_cast<int>(chosen.size()) < m) {
    throw GenerationFailed("random_dissociated: draw budget exhausted after " + std::to_string(chosen.size()) +
                           " of " + std::to_string(m) + " elements");
  }
  return Set(n, std::move(chosen));
}

Set random_dissociated(int n, int m, std::uint64_t seed) {
  return random_dissociated(n, m, FamilySpec{std::max(m, 1), Set(n, {0})}, seed);
}

}  // namespace f2ac
