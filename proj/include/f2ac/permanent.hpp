#pragma once

// Permanents of small nonnegative integer matrices, Frobenius-Konig
// certificates, and the counting lemmas built on them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "f2ac/dissociation.hpp"
#include "f2ac/f2n.hpp"
#include "f2ac/numeric.hpp"

namespace f2ac {

using CombMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Column-subset enumeration cap for the inclusion-exclusion formula.
inline constexpr std::uint64_t kRyserBudget = std::uint64_t{1} << 26;

/// Sum over injective maps sigma: rows -> columns of prod h(i, sigma(i)).
/// Needs rows <= cols and nonnegative entries. Uses rectangular Ryser
/// inclusion-exclusion; falls back to pruned expansion for cols <= 22 when the
/// subset count exceeds kRyserBudget. An empty row set gives 1.
BigInt permanent(const CombMatrix& h);
/// The rectangular inclusion-exclusion formula alone (tests cross-check it).
BigInt permanent_ryser(const CombMatrix& h);
/// Depth-first expansion over injective maps, skipping zero entries.
BigInt permanent_expand(const CombMatrix& h);

struct FkResult {
  bool zero = false;
  /// When zero: rows x cols of an all-zero block, sizes summing to
  /// max(rows, cols) + 1. Indices refer to the matrix as given.
  std::vector<int> zero_rows;
  std::vector<int> zero_cols;
  /// When positive: (row, col) pairs of a nonzero diagonal covering the
  /// smaller dimension.
  std::vector<std::pair<int, int>> diagonal;
};

/// Decides whether the permanent (over the smaller dimension) vanishes, by
/// maximum bipartite matching on the support, and returns a certificate.
FkResult fk_zero_test(const CombMatrix& h);
/// Checks a certificate against the matrix.
bool verify_fk(const CombMatrix& h, const FkResult& r);

struct ReducedPermanentReport {
  bool rows_ok = false;     // every row sum >= 2
  bool cols_ok = false;     // every column sum >= 1
  bool total_ok = false;    // total = 2 * rows
  bool hypotheses_hold = false;
  std::vector<int> kept_columns;  // columns of H_0
  std::optional<bool> per_h0_positive;  // set only when hypotheses hold
  FkResult certificate;
};

ReducedPermanentReport reduced_permanent_check(const CombMatrix& h);
/// Columns of h whose sum is not exactly 1.
CombMatrix delete_unit_columns(const CombMatrix& h, std::vector<int>* kept = nullptr);

struct ExhaustiveSummary {
  int p = 0;
  int r = 0;
  std::uint64_t examined = 0;
  std::uint64_t satisfying = 0;  // hypotheses hold
  std::uint64_t falsified = 0;   // per H_0 = 0 under the hypotheses
  std::uint64_t oracle_mismatches = 0;  // matching verdict vs explicit permanent
};

/// All p x r matrices with entries in {0, 1, 2}.
ExhaustiveSummary lemma_per0_exhaustive(int p, int r);

struct PiReport {
  int T = 0;
  std::vector<int> alpha;  // alpha_i for i = 0..T-2
  int z = 0;
  int q_z = 0;
  bool z_found = true;  // false: no cutoff exists and pi = T^p by convention
  BigInt pi;
  Rational delta0;
  bool hypotheses_hold = false;  // r >= p - delta0 and p >= 2 delta0 + 3
  std::vector<std::string> violated_hypotheses;
  BigInt bound;  // floor of 2^{3p} delta0^{4 delta0} (delta0 >= 1) or 2^{2p}
  bool holds = false;  // exact comparison of pi with the unrounded bound
};

/// Throws PreconditionError unless every t_j >= 2 and sum t_j = 2p.
PiReport pi_value(const std::vector<int>& ts, int p, const Rational& delta0);

struct SophisticatedReport {
  int p = 0;
  FamilyStatus family = FamilyStatus::kUndecided;
  BigInt z;                  // solutions of lambda_1 + ... + lambda_{2p} = 0
  BigInt bound;              // sum over admissible S* of per M(S*)
  std::size_t subsets_used = 0;
  bool holds = false;        // z <= bound
  BigInt corollary_lhs;      // z^2
  BigInt corollary_rhs;      // 2^{4p} (p!)^2 prod |E_i|
  bool corollary_holds = false;
};

/// Classes are 0-based index lists partitioning {0, ..., 2p-1}. Refuses
/// (PreconditionError) unless Lambda is verified in Lambda(2p), p <= 4 and
/// every E_i is a subset of Lambda.
SophisticatedReport sophisticated_bound(const std::vector<Set>& es, const std::vector<std::vector<int>>& classes,
                                        const Set& lambda);

/// Matrix file: "x y" then x lines of y nonnegative integers.
CombMatrix parse_matrix(std::istream& in);
CombMatrix read_matrix_file(const std::filesystem::path& path);
std::string serialize_matrix(const CombMatrix& h);

}  // namespace f2ac
