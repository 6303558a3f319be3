#pragma once

// Structure inside sumsets of dissociated sets: connectedness refinement,
// greedy near-disjoint supports, Bombieri intersections, the fiber-sum bound
// for T_p, and combinatorial rectangle extraction with a planted generator.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2ac/dissociation.hpp"
#include "f2ac/f2n.hpp"
#include "f2ac/numeric.hpp"

namespace f2ac {

// ---------------------------------------------------------------------------
// Connectedness

struct ConnectednessParams {
  int k = 2;
  Rational beta1{1, 4};
  Rational beta2{1, 2};
  Rational c{1, 8};
  /// Q is assumed to lie in the d-fold distinct sumset; used by the step bound only.
  int d = 2;
  /// Energy evaluations per violation search on the randomized path.
  std::uint64_t search_budget = 256;
  /// Exhaustive subset search when |Q_i| <= this.
  int exhaustive_limit = 14;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ConnectednessStep {
  Set removed;  // the violating B
  std::size_t size_before = 0;
  std::size_t size_after = 0;
  BigInt energy_before;
  BigInt energy_after;
  BigInt energy_removed;
  bool exhaustive = false;  // found by the exhaustive search
};

enum class ConnectednessStatus { kCertified, kBestEffort };
std::string_view to_string(ConnectednessStatus s);

struct ConnectednessResult {
  Set refined;
  std::vector<ConnectednessStep> trace;
  ConnectednessStatus status = ConnectednessStatus::kCertified;
  /// T_k(Q \ B) > T_k(Q)(1 - C|B|/|Q|)^{2k} on every step.
  bool complement_bound_ok = true;
  /// D_k strictly increased on every step whose exact factor
  /// (1 - Cc)^2 / (1 - c), c = |B|/|Q_i|, exceeds 1 (always when C <= 1/2).
  bool dk_increase_ok = true;
  /// Only meaningful when C < 1/4: every step gained at least
  /// k log(1 + beta1 (1 - 4C)) in D_k.
  std::optional<bool> step_gain_ok;
  /// Only when C < 1/4: (1 + beta1(1 - 4C))^{sk} T_k(Q) <= d^{8d} k^{kd} |Q|^k,
  /// the exact form of the step-count bound (needs Q in d-fold sums of a
  /// set in Lambda(2dk)).
  std::optional<bool> step_bound_holds;
  /// |Q'| >= (1 - beta2)^s |Q|.
  bool size_bound_holds = true;
  std::uint64_t candidates_examined = 0;
};

/// Repeatedly removes a most violating mid-sized subset until none is found.
/// Throws PreconditionError when |Q| <= 2.
ConnectednessResult refine_connected(const Set& q, const ConnectednessParams& params);

struct ViolationSearch {
  std::optional<Set> violator;
  bool exhaustive = false;
  std::uint64_t examined = 0;
};

/// One search for B with beta1|Q| <= |B| <= beta2|Q| and
/// T_k(B) < C^{2k} (|B|/|Q|)^{2k} T_k(Q); returns the most violating found.
ViolationSearch find_violation(const Set& q, const ConnectednessParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// Greedy supports and Bombieri

struct GreedyResult {
  std::vector<std::size_t> indices;
  /// |(S_{n_1} u ... u S_{n_{l-1}}) n S_{n_l}| for l >= 2, in order.
  std::vector<std::size_t> overlaps;
};

/// First-feasible-by-index greedy: n_1 = 0, then the smallest unused index
/// whose overlap with the union so far is at most zeta * p. Returns at most w
/// indices. Throws PreconditionError if the sets have unequal sizes.
GreedyResult greedy_disjoint_supports(const std::vector<std::vector<int>>& supports, const Rational& zeta, int w);

/// 2 sum_{omega >= ceil(zeta p)}^{p} (p w)^omega / omega!
///   * sum_{n_1 + ... + n_rho = p - omega, n_i <= l_i} prod |A*_i|^{n_i} / n_i!
/// where blocks lists A_1..A_p (pairwise equal or disjoint) and A*_i, l_i are
/// the distinct blocks and their multiplicities.
Rational greedy_threshold(const std::vector<std::vector<int>>& blocks, const Rational& zeta, int w);

struct BombieriResult {
  std::vector<std::size_t> indices;
  Set intersection;
  Rational bound;  // (lambda - t/q) |B| / C(q, t)
  bool exhaustive = false;
  std::optional<bool> bound_holds;  // set on the exhaustive path
};

/// Finds t of the sets with a large common intersection: exhaustive over
/// C(q, t) <= 10^6 choices (lexicographically first maximum), otherwise
/// greedy descent from every starting set. Throws PreconditionError unless
/// every B_i is inside B with |B_i| >= lambda |B|, and 1 <= t <= lambda q.
BombieriResult bombieri_intersection(const std::vector<Set>& sets, const Set& ground, const Rational& lambda,
                                     std::size_t t);

// ---------------------------------------------------------------------------
// Fibers

/// Index of sums of d distinct elements of Lambda. Unique for Lambda in
/// Lambda(2d); a sum reachable two ways is flagged ambiguous.
class SumIndex {
 public:
  SumIndex(const Set& lambda, int d, std::uint64_t budget = 10'000'000);
  int d() const noexcept { return d_; }
  const Set& lambda() const noexcept { return lambda_; }
  /// Positions (into lambda) of the summands of x, ascending; empty if x is not a d-fold sum.
  std::vector<int> decompose(Word x) const;
  bool ambiguous() const noexcept { return ambiguous_; }

 private:
  Set lambda_;
  int d_;
  bool ambiguous_ = false;
  std::vector<std::pair<Word, std::vector<int>>> table_;  // sorted by word
};

struct FiberDecomposition {
  Set lambda1;
  Set lambda2;
  /// fibers[i] = D(lambda1[i]) inside lambda2.
  std::vector<Set> fibers;
  /// Q n (Lambda1 + Lambda2).
  Set covered;
  std::size_t s1 = 0;  // nonempty fibers
  std::size_t s2 = 0;  // |Lambda2|
};

/// Throws PreconditionError if lambda1 and lambda2 meet or the union is
/// ambiguous for pair sums.
FiberDecomposition decompose_fibers(const Set& q, const Set& lambda1, const Set& lambda2);
/// sum |D| = |covered|, and sum |D|^x <= s2^{x-1} |covered| for 1 <= x <= max_x.
bool check_fiber_invariants(const FiberDecomposition& fd, int max_x = 4);

// ---------------------------------------------------------------------------
// Fiber-sum bound for T_p

struct Inverse2Report {
  int p = 0;
  Rational m;  // the parameter M
  std::size_t q_size = 0;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  bool hypothesis_holds = false;  // |Q| >= max{2 s2 p, 2^8 s2 p M^8}
  std::string status;             // "holds", "violated", "undecided", "hypothesis-not-met"
  Verdict verdict = Verdict::kUndecided;
  Interval delta0;        // enclosure of max{p log(2eM) / log(|Q|/(s2 p)), 1}
  Rational delta0_lo;     // delta0 rounded down to a multiple of 1/64
  Rational delta0_hi;     // rounded up
  std::vector<BigInt> support_sums;  // index r: sum over |S| = r of prod_alpha sum_beta |D_a n D_b|
  BigInt lhs;             // T_p(Q)
  Rational rhs_lo;
  Rational rhs_hi;
  Rational tail;          // p^{2p} |Q|^p / (2 M^p)
  double slack = 0.0;     // rhs_lo / lhs
};

/// Evaluates both sides of the fiber-sum bound on decomp.covered.
/// Needs p >= 1, p <= 6, s1 <= 14; throws BudgetExceeded otherwise.
Inverse2Report inverse2_bound(const FiberDecomposition& decomp, int p, const Rational& m);

// ---------------------------------------------------------------------------
// Rectangle extraction

struct Rectangle {
  std::vector<Word> prefix;  // lambda_1..lambda_{d-2}
  Set l;
  Set lp;
  /// (sum prefix) + L + L'.
  Set sum_set() const;
};

struct InverseParams {
  int p = 4;
  Rational k{1};
  Rational eta{1, 2};
  /// Unset: 1/(16 K_1) with K_1 = ceil(2^13 K* X^{1/p}) computed per round.
  std::optional<Rational> epsilon;
  /// Unset: epsilon / 2.
  std::optional<Rational> zeta;
  /// Unset: from log(m3/s2) / (eps^2 p1 log(2^6/eps^2)), capped by the candidate count.
  std::optional<int> w;
  /// Unset: max(1, floor(eps w / 2)), capped by lambda q.
  std::optional<int> t;
  int rounds = 16;
  int split_trials = 32;
  int candidates_per_pivot = 64;
  int min_side = 2;
  /// Independent greedy passes (two fixed candidate rankings, then a random
  /// ranking per round); the pass covering the most of Q is returned.
  int restarts = 8;
  /// Score each round's candidates by area plus a greedy rollout on the rest.
  bool lookahead = true;
  ConnectednessParams connect{};
  std::uint64_t seed = 0;

  void validate() const;
};

struct ExtractionRound {
  std::size_t working_size = 0;
  std::size_t refined_size = 0;
  ConnectednessStatus refine_status = ConnectednessStatus::kCertified;
  std::size_t refine_steps = 0;
  std::size_t cross_mass = 0;     // |Q1 n (Lambda1 + Lambda2)| for the chosen split
  bool split_guarantee = false;   // cross_mass >= |Q1| / 2
  std::size_t q3_size = 0;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::vector<std::size_t> bucket_sizes;  // |Lambda^(j)|, j = 1..
  Rational epsilon;
  Rational zeta;
  int w = 0;
  int t = 0;
  bool epsilon_condition = false;  // epsilon >= 16 / (eta p)
  int pivot = -1;                  // index into lambda1
  std::size_t supports = 0;        // candidate supports containing the pivot
  std::size_t greedy_selected = 0;
  std::size_t seed_l = 0;
  std::size_t seed_lp = 0;
  std::optional<Rectangle> emitted;
  std::string note;
};

struct ExtractionResult {
  std::vector<Rectangle> rectangles;
  std::vector<ExtractionRound> trace;
  double coverage = 0.0;  // |Q n union of rectangles| / |Q|
  std::size_t covered = 0;
  FamilyStatus family = FamilyStatus::kUndecided;
  std::vector<std::string> warnings;
  bool containment_ok = true;
  bool disjointness_ok = true;
};

/// Rectangles L + L' inside Q for Q in the 2-fold distinct sumset of Lambda.
/// Throws PreconditionError if Lambda is not in Lambda(4p) (undecided is
/// accepted with a warning) or Q has an element outside 2-fold sums.
ExtractionResult extract_rectangles_pair(const Set& q, const Set& lambda, const InverseParams& params);

struct DExtractionResult {
  std::optional<Rectangle> rectangle;
  std::vector<Set> parts;  // S_1..S_d of the chosen partition
  std::size_t partition_mass = 0;
  std::size_t prefix_mass = 0;  // |Q(a)| for the chosen prefix
  std::optional<ExtractionResult> pair;
  FamilyStatus family = FamilyStatus::kUndecided;
  std::vector<std::string> warnings;
  bool containment_ok = true;
};

/// Prefix + rectangle inside Q for Q in the d-fold distinct sumset of Lambda.
/// d = 2 delegates to the pair version and reports its largest rectangle.
DExtractionResult extract_rectangles_d(const Set& q, const Set& lambda, int d, const InverseParams& params);

/// True iff every rectangle lies in q, has L n L' empty with the prefix outside
/// both, and the rectangles' sum sets are pairwise disjoint.
bool rectangles_valid(const std::vector<Rectangle>& rects, const Set& q);

// ---------------------------------------------------------------------------
// Planted instances

struct PlantParams {
  int n = 20;
  int lambda_size = 16;
  int h = 1;
  int lsize = 4;
  int lpsize = 4;
  Rational noise{0};  // noise pairs = floor(noise * planted mass)
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  Set lambda;
  Set q;
  std::vector<Rectangle> planted;
  Set planted_union;
  Set noise;
};

/// Random dissociated Lambda, h rectangles with pairwise disjoint sum sets,
/// plus random noise pairs. Throws GenerationFailed when the rectangles
/// cannot be placed.
PlantedInstance plant_instance(const PlantParams& params);

/// |planted n union of rects| / |planted|.
double planted_coverage(const std::vector<Rectangle>& rects, const Set& planted);

}  // namespace f2ac
