#pragma once

// Dissociated sets and the families Lambda_R(k) over F_2^n.
//
// Over F_2^n a signed combination sum eps_i lambda_i with eps_i in {-1,0,1}
// is just the XOR of a subset, so these tests are subset-XOR tests. They are
// not valid for groups of odd characteristic.

#include <array>
#include <cstdint>
#include <string_view>

#include "f2ac/f2n.hpp"

namespace f2ac {

/// Incremental GF(2) row-echelon basis, one pivot per bit.
class Gf2Basis {
 public:
  /// Reduces w against the basis; returns true and stores it if independent.
  bool insert(Word w);
  /// Residue of w after reduction (0 iff w is in the span).
  Word reduce(Word w) const;
  int rank() const noexcept { return rank_; }

 private:
  std::array<Word, 32> pivot_{};
  int rank_ = 0;
};

int gf2_rank(std::span<const Word> words);

/// No nonempty subset XORs to 0, i.e. GF(2) linear independence.
bool is_dissociated(const Set& l);

enum class FamilyStatus { kTrue, kFalse, kUndecided };
std::string_view to_string(FamilyStatus s);

/// Parameters of Lambda_R(k): no nonempty subset of size <= k sums into R.
struct FamilySpec {
  int k = 1;
  Set r = Set(1, {0});

  static FamilySpec plain(int dim, int k) { return {k, Set(dim, {0})}; }
  void validate(int dim) const;
};

inline constexpr std::uint64_t kFamilyBudget = 10'000'000;

/// Membership in Lambda_R(k). Uses the rank test when R = {0} and k >= |L|,
/// otherwise in_family_mitm.
FamilyStatus in_family(const Set& l, const FamilySpec& spec, std::uint64_t budget = kFamilyBudget);

/// Meet-in-the-middle test: hashes XORs of subsets of size <= floor(k/2) and
/// probes with subsets of size <= ceil(k/2). Returns kUndecided when the number
/// of enumerated subsets would exceed budget. Requires |L| <= 64.
FamilyStatus in_family_mitm(const Set& l, const FamilySpec& spec, std::uint64_t budget = kFamilyBudget);

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling: draws uniform nonzero words and keeps each one that
/// leaves the set in Lambda_R(k) (undecided counts as rejection). Gives up
/// after max_draws draws.
Set random_dissociated(int n, int m, const FamilySpec& spec, std::uint64_t seed, std::uint64_t max_draws = 0);

/// Shorthand for R = {0}, k = m (plain dissociativity).
Set random_dissociated(int n, int m, std::uint64_t seed);

}  // namespace f2ac
