#include "f2ac/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <cstdio>
#include <ostream>

#include "f2ac/dissociation.hpp"
#include "f2ac/energy.hpp"
#include "f2ac/parallel.hpp"
#include "f2ac/wht.hpp"

namespace f2ac {

namespace {

using Clock = std::chrono::steady_clock;

Rational rat(std::size_t x) { return Rational(BigInt(x)); }
Rational rpow(const Rational& b, int e) { return ipow(b, static_cast<unsigned>(e)); }
BigInt bpow(const BigInt& b, int e) { return ipow(b, static_cast<unsigned>(e)); }

Rational density(const Set& a) { return Rational(BigInt(a.size()), BigInt(1) << a.dim()); }

// Largest L with 2^L <= x, for x >= 1.
int floor_log2(const Rational& x) {
  const BigInt f = floor(x);
  int l = 0;
  while ((BigInt(1) << (l + 1)) <= f) ++l;
  return l;
}

double ratio(const Rational& num, const Rational& den) {
  if (den == 0) return num == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return to_double(num / den);
}

// Sets verdict and slack once lhs and rhs are filled in.
void finish(BoundReport& r, Clock::time_point start) {
  if (!r.failed_preconditions.empty()) {
    r.verdict = Verdict::kUndecided;
  } else if (r.orientation == Orientation::kUpper) {
    r.verdict = leq_interval(r.lhs, r.rhs);
  } else {
    r.verdict = geq_interval(r.lhs, r.rhs);
  }
  r.slack = r.orientation == Orientation::kUpper ? ratio(r.rhs.lo, r.lhs) : ratio(r.lhs, r.rhs.hi);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

Interval exact(const Rational& x) { return {x, x}; }

void need(BoundReport& r, bool ok, std::string_view what) {
  if (!ok) r.failed_preconditions.emplace_back(what);
}

void need_family(BoundReport& r, const Set& lambda, int m) {
  const FamilyStatus s = in_family(lambda, FamilySpec::plain(lambda.dim(), m));
  if (s != FamilyStatus::kTrue) {
    r.failed_preconditions.push_back("Lambda in Lambda(" + std::to_string(m) + ") is " + std::string(to_string(s)));
  }
}

std::string describe(const Set& s) { return std::to_string(s.size()) + "@" + std::to_string(s.dim()); }

}  // namespace

Set greedy_dissociated(const Set& pool, std::span<const Word> order) {
  Gf2Basis basis;
  std::vector<Word> out;
  for (Word w : order) {
    if (pool.contains(w) && basis.insert(w)) out.push_back(w);
  }
  return Set(pool.dim(), std::move(out));
}

BoundReport check_chang(const Set& a, const Rational& alpha, const Set& lambda) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "chang";
  r.instance = "A=" + describe(a) + " alpha=" + to_string(alpha) + " |Lambda|=" + std::to_string(lambda.size());
  const Rational delta = density(a);
  need(r, alpha > 0 && alpha <= delta, "0 < alpha <= delta");
  need(r, lambda.dim() == a.dim(), "Lambda and A share a dimension");
  need(r, is_dissociated(lambda), "Lambda dissociated");
  if (r.failed_preconditions.empty()) need(r, is_subset(lambda, large_spectrum(a, alpha)), "Lambda inside R_alpha(A)");
  r.lhs = rat(lambda.size());
  if (delta > 0) {
    const Rational scale = 2 * (delta / alpha) * (delta / alpha);
    const Interval lg = log2_bounds(1 / delta);
    r.rhs = {scale * lg.lo, scale * lg.hi};
  }
  finish(r, start);
  return r;
}

BoundReport check_parseval_spectrum(const Set& a, const Rational& alpha) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "parseval";
  r.instance = "A=" + describe(a) + " alpha=" + to_string(alpha);
  need(r, alpha > 0 && alpha <= 1, "0 < alpha <= 1");
  if (r.failed_preconditions.empty()) r.lhs = rat(large_spectrum(a, alpha).size());
  r.rhs = alpha > 0 ? exact(density(a) / (alpha * alpha)) : exact(0);
  finish(r, start);
  return r;
}

BoundReport check_diss_energy(const Set& lambda, int p) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "diss";
  r.instance = "Lambda=" + describe(lambda) + " p=" + std::to_string(p);
  need(r, p >= 1, "p >= 1");
  if (p >= 1) need_family(r, lambda, 2 * p);
  r.lhs = Rational(energy_compressed(lambda, std::max(p, 1)));
  r.rhs = exact(Rational(bpow(BigInt(p), p) * bpow(BigInt(lambda.size()), p)));
  finish(r, start);
  return r;
}

BoundReport check_rudin_even(const Set& lambda, const std::vector<std::int64_t>& coeffs, int p) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "rudin";
  r.instance = "Lambda=" + describe(lambda) + " p=" + std::to_string(p);
  if (coeffs.size() != lambda.size()) throw PreconditionError("one coefficient per element of Lambda");
  if (lambda.dim() > 20) throw BudgetExceeded("check_rudin_even: dimension above 20");
  need(r, p >= 1, "p >= 1");
  need(r, is_dissociated(lambda), "Lambda dissociated");
  Function<std::int64_t> g(lambda.dim());
  BigInt l2 = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    g[lambda[i]] = coeffs[i];
    l2 += BigInt(coeffs[i]) * coeffs[i];
  }
  const Spectrum<std::int64_t> f = wht(g);
  BigInt moment = 0;
  for (std::int64_t v : f) moment += bpow(BigInt(v), 2 * std::max(p, 1));
  r.lhs = Rational(moment, BigInt(1) << lambda.dim());
  const BigInt base = bpow(l2, std::max(p, 1));
  r.rhs = exact(Rational(bpow(BigInt(p), p) * base));
  if (base != 0) r.extra.emplace_back("constant", to_string(r.lhs / Rational(base)));
  finish(r, start);
  return r;
}

BoundReport check_sumset_energy(const Set& q, const Set& lambda, int d, int p) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "dissd";
  r.instance = "Q=" + describe(q) + " Lambda=" + describe(lambda) + " d=" + std::to_string(d) + " p=" + std::to_string(p);
  if (d < 1 || p < 1) throw PreconditionError("d and p must be positive");
  need(r, p >= 2, "p >= 2");
  need(r, lambda.size() >= static_cast<std::size_t>(4 * d * d), "|Lambda| >= 4 d^2");
  need_family(r, lambda, 2 * d * p);
  need(r, is_subset(q, dotplus_power(lambda, d)), "Q inside the d-fold distinct sumset");
  r.lhs = Rational(energy_compressed(q, p));
  r.rhs = exact(Rational((BigInt(1) << (8 * d * p)) * bpow(BigInt(p), d * p) * bpow(BigInt(q.size()), p)));
  finish(r, start);
  return r;
}

BoundReport check_full_sumset_lower(const Set& lambda1, int d, int p) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "exact";
  r.orientation = Orientation::kLower;
  r.instance = "Lambda1=" + describe(lambda1) + " d=" + std::to_string(d) + " p=" + std::to_string(p);
  if (d < 1 || p < 1) throw PreconditionError("d and p must be positive");
  need(r, p >= 2, "p >= 2");
  need(r, static_cast<std::size_t>(2 * d * p) <= lambda1.size(), "p <= |Lambda1| / (2d)");
  need_family(r, lambda1, 2 * d);
  const Set q = dotplus_power(lambda1, d);
  r.lhs = Rational(energy_compressed(q, p));
  r.rhs = exact(Rational(bpow(BigInt(p), p * d) * bpow(BigInt(q.size()), p), BigInt(1) << (3 * p * d)));
  const auto pd = static_cast<unsigned>(p * d);
  const BigInt multinom = factorial(pd) / bpow(factorial(static_cast<unsigned>(d)), p);
  const BigInt counting = binomial(static_cast<unsigned>(lambda1.size()), pd) * multinom * multinom;
  const bool counting_holds = r.lhs >= Rational(counting);
  r.extra.emplace_back("counting_bound", to_string(counting));
  r.extra.emplace_back("counting_holds", counting_holds ? "true" : "false");
  r.extra.emplace_back("q_size", std::to_string(q.size()));
  finish(r, start);
  if (r.verdict == Verdict::kHolds && !counting_holds) r.verdict = Verdict::kViolated;
  return r;
}

BoundReport check_spectrum_energy_lower(const Set& a, const Set& b, const Rational& alpha, int k) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "maing";
  r.orientation = Orientation::kLower;
  r.instance = "A=" + describe(a) + " B=" + describe(b) + " alpha=" + to_string(alpha) + " k=" + std::to_string(k);
  if (k < 1) throw PreconditionError("k must be positive");
  const Rational delta = density(a);
  need(r, k >= 2, "k >= 2");
  need(r, alpha > 0 && alpha <= delta, "0 < alpha <= delta");
  need(r, b.dim() == a.dim(), "A and B share a dimension");
  if (r.failed_preconditions.empty()) need(r, is_subset(b, large_spectrum(a, alpha)), "B inside R_alpha(A)");
  r.lhs = Rational(energy_compressed(b, k));
  // delta alpha^{2k} / delta^{2k} |B|^{2k}
  r.rhs = delta > 0 ? exact(rpow(alpha, 2 * k) * rpow(rat(b.size()), 2 * k) / rpow(delta, 2 * k - 1)) : exact(0);
  finish(r, start);
  return r;
}

BoundReport check_bourgain_intersection(const Set& a, const Set& lambda, const Rational& alpha, int d) {
  const auto start = Clock::now();
  BoundReport r;
  r.theorem = "bourgain";
  r.instance = "A=" + describe(a) + " Lambda=" + describe(lambda) + " alpha=" + to_string(alpha) + " d=" + std::to_string(d);
  if (d < 1) throw PreconditionError("d must be positive");
  const Rational delta = density(a);
  need(r, delta > 0 && delta <= Rational(1, 4), "0 < delta <= 1/4");
  need(r, alpha > 0 && alpha <= delta, "0 < alpha <= delta");
  if (delta > 0) {
    // d <= log(1/delta)/4  <=>  2^{4d} <= 1/delta
    need(r, Rational(BigInt(1) << (4 * d)) <= 1 / delta, "d <= log(1/delta) / 4");
    const int l = floor_log2(1 / delta);
    if (l >= 1) need_family(r, lambda, 2 * l);
  }
  if (!r.failed_preconditions.empty()) {
    finish(r, start);
    return r;
  }
  const Set spec = large_spectrum(a, alpha);
  r.lhs = rat(intersection_size(dotplus_power(lambda, d), spec));
  const Rational scale = (delta / alpha) * (delta / alpha);
  const Interval lg = log2_bounds(1 / delta);
  const Rational c = Rational(4096, d);
  r.rhs = {scale * rpow(c * lg.lo, d), scale * rpow(c * lg.hi, d)};
  finish(r, start);
  return r;
}

// ---------------------------------------------------------------------------
// Majority

Set hamming_sphere(int nprime, int l) {
  check_dim(nprime);
  if (l < 0 || l > nprime) throw PreconditionError("hamming_sphere: need 0 <= l <= n'");
  std::vector<Word> out;
  for (Word x = 0; x < (Word{1} << nprime); ++x) {
    if (__builtin_popcount(x) == l) out.push_back(x);
  }
  return Set(nprime, std::move(out));
}

BigInt majority_coefficient(int nprime) {
  Rational total = 0;
  for (int s = (nprime + 1) / 2; s <= nprime; ++s) {
    total += Rational(BigInt(2 * s - nprime), BigInt(nprime)) * binomial(static_cast<unsigned>(nprime), static_cast<unsigned>(s));
  }
  if (denominator(total) != 1) throw std::logic_error("majority coefficient is not an integer");
  return numerator(total);
}

BigInt majority_coefficient_alt(int nprime) {
  BigInt total = 0;
  for (int s = (nprime + 1) / 2; s <= nprime; ++s) {
    total += 2 * binomial(static_cast<unsigned>(nprime - 1), static_cast<unsigned>(s)) -
             binomial(static_cast<unsigned>(nprime), static_cast<unsigned>(s));
  }
  return abs(total);
}

namespace {

Set majority_set(int nprime) {
  std::vector<Word> out;
  for (Word x = 0; x < (Word{1} << nprime); ++x) {
    if (2 * __builtin_popcount(x) >= nprime) out.push_back(x);
  }
  return Set(nprime, std::move(out));
}

// Smallest integer m with m^2 n >= (c delta N)^2, so that |v| >= alpha N iff |v| >= m.
std::int64_t alpha_threshold(const MajorityInstance& inst) {
  const Rational nn(BigInt(1) << inst.n);
  const Rational t = inst.c * inst.c * inst.delta * inst.delta * nn * nn / inst.n;
  const BigInt x = ceil(t);
  BigInt m = iroot_floor(x, 2);
  if (m * m < x) ++m;
  return static_cast<std::int64_t>(m);
}

}  // namespace

BigInt majority_coefficient_bruteforce(int nprime) {
  const Spectrum<std::int64_t> s = spectrum_words(majority_set(nprime));
  return abs(BigInt(s[1]));
}

MajorityInstance build_majority(int n, const Rational& delta) {
  if (n < 1 || n > 20) throw PreconditionError("build_majority: need 1 <= n <= 20");
  const Rational nn(BigInt(1) << n);
  if (delta < 1 / nn || delta > Rational(1, 16)) throw PreconditionError("build_majority: need 1/N <= delta <= 1/16");
  MajorityInstance inst;
  inst.n = n;
  inst.delta = delta;
  inst.k = floor_log2(1 / (4 * delta));
  inst.nprime = n - inst.k;
  if (inst.nprime < 1) throw PreconditionError("build_majority: delta too small for n");
  std::vector<Word> a;
  for (Word x : majority_set(inst.nprime)) a.push_back(x);
  inst.a = Set(n, std::move(a));
  // Largest c_S = 2^{-j} with V >= c_S 2^{n'} / sqrt(n'); then c = 4 c_S, as in
  // the chain V >= c_S 2^{n'}/sqrt(n') >= 4 c_S delta N / sqrt(n).
  const BigInt v = majority_coefficient(inst.nprime);
  const BigInt pow = BigInt(1) << inst.nprime;
  int j = 0;
  while (v * v * inst.nprime * (BigInt(1) << (2 * j)) < pow * pow) ++j;
  inst.c = Rational(4, BigInt(1) << j);
  inst.constant_rederived = true;
  const Interval root = sqrt_bounds(Rational(n));
  inst.alpha = {inst.c * delta / root.hi, inst.c * delta / root.lo};
  return inst;
}

bool MajorityReport::all_hold() const {
  return coefficient_matches && size_bounds && density_bounds && shift_invariance && h1_in_spectrum &&
         spectrum_lower && intersection.holds() && proposition.holds();
}

MajorityReport verify_majority(const MajorityInstance& inst, int d) {
  if (d < 1 || d > inst.k + 1) throw PreconditionError("verify_majority: need 1 <= d <= k + 1");
  MajorityReport rep;
  const int n = inst.n;
  const int np = inst.nprime;
  const Rational nn(BigInt(1) << n);
  rep.coefficient = majority_coefficient(np);
  const Spectrum<std::int64_t> inner = spectrum_words(majority_set(np));
  bool match = majority_coefficient_alt(np) == rep.coefficient;
  for (int i = 0; i < np; ++i) match = match && abs(BigInt(inner[Word{1} << i])) == rep.coefficient;
  rep.coefficient_matches = match;

  const BigInt size = inst.a.size();
  rep.size_bounds = (BigInt(1) << (n - inst.k - 2 >= 0 ? n - inst.k - 2 : 0)) <= size && size <= (BigInt(1) << (n - inst.k));
  rep.density_bounds = inst.delta * nn <= Rational(size) && Rational(size) <= 8 * inst.delta * nn;

  const Spectrum<std::int64_t> full = spectrum_words(inst.a);
  const std::int64_t m = alpha_threshold(inst);
  const auto above_alpha = [m](std::int64_t v) { return (v < 0 ? -v : v) >= m; };
  const Word perp_mask = dim_mask(n) & ~dim_mask(np);
  bool shift = true;
  bool h1 = true;
  for (int i = 0; i < np; ++i) {
    const Word r = Word{1} << i;
    for (Word h = 0;; h = (h - perp_mask) & perp_mask) {
      shift = shift && full[r ^ h] == inner[r];
      h1 = h1 && above_alpha(full[r ^ h]);
      if (h == perp_mask) break;
    }
  }
  rep.shift_invariance = shift;
  rep.h1_in_spectrum = h1;
  std::vector<Word> spec;
  bool equals_h = true;
  for (Word r = 0; r < full.size(); ++r) {
    const bool in = above_alpha(full[r]);
    if (in) spec.push_back(r);
    const bool expected = __builtin_popcount(r & dim_mask(np)) <= 1;
    equals_h = equals_h && in == expected;
  }
  rep.spectrum_size = spec.size();
  rep.spectrum_lower = BigInt(spec.size()) >= BigInt(np) * (BigInt(1) << inst.k);
  rep.spectrum_equals_h = equals_h;

  const Set spectrum(n, std::move(spec));
  std::vector<Word> basis;
  for (int i = 0; i < n; ++i) basis.push_back(Word{1} << i);
  const Set lambda(n, basis);
  const std::size_t count = intersection_size(dotplus_power(lambda, d), spectrum);
  const std::string inst_text = "n=" + std::to_string(n) + " delta=" + to_string(inst.delta) + " d=" + std::to_string(d);

  auto start = Clock::now();
  rep.intersection.theorem = "majority-count";
  rep.intersection.instance = inst_text + " bound=n'C(k,d-1)";
  rep.intersection.orientation = Orientation::kLower;
  rep.intersection.lhs = rat(count);
  rep.intersection.rhs = exact(Rational(BigInt(np) * binomial(static_cast<unsigned>(inst.k), static_cast<unsigned>(d - 1))));
  finish(rep.intersection, start);

  // 2^{-30} (delta/alpha)^2 (log(1/delta)/(16d))^{d-1} with (delta/alpha)^2 = n / c^2.
  start = Clock::now();
  rep.proposition.theorem = "majority";
  rep.proposition.instance = inst_text + " bound=proposition";
  rep.proposition.orientation = Orientation::kLower;
  rep.proposition.lhs = rat(count);
  const Rational scale = Rational(n) / (inst.c * inst.c) / Rational(BigInt(1) << 30);
  const Interval lg = log2_bounds(1 / inst.delta);
  rep.proposition.rhs = {scale * rpow(lg.lo / (16 * d), d - 1), scale * rpow(lg.hi / (16 * d), d - 1)};
  rep.proposition.extra.emplace_back("c", to_string(inst.c));
  rep.proposition.extra.emplace_back("spectrum_size", std::to_string(rep.spectrum_size));
  rep.proposition.extra.emplace_back("spectrum_equals_h", rep.spectrum_equals_h ? "true" : "false");
  finish(rep.proposition, start);
  if (!rep.all_hold() && rep.proposition.verdict == Verdict::kHolds) rep.proposition.verdict = Verdict::kViolated;
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int pick(Rng& rng, const std::vector<int>& v) {
  if (v.empty()) throw PreconditionError("sweep: empty parameter list");
  return v[uniform_below(rng, v.size())];
}

int in_range(Rng& rng, int lo, int hi) { return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))); }

Set random_set(Rng& rng, int n, std::size_t size) {
  std::vector<Word> all(std::size_t{1} << n);
  std::iota(all.begin(), all.end(), Word{0});
  shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(size, all.size()));
  return Set(n, std::move(all));
}

Set random_subset(Rng& rng, const Set& s, std::size_t max_size) {
  std::vector<Word> w(s.begin(), s.end());
  shuffle(w.begin(), w.end(), rng);
  const std::size_t size = 1 + uniform_below(rng, std::min(max_size, w.size()));
  w.resize(size);
  return Set(s.dim(), std::move(w));
}

// alpha = delta * j / 8 for j in 1..8.
Rational random_alpha(Rng& rng, const Set& a) { return density(a) * Rational(in_range(rng, 1, 8), 8); }

BoundReport one_instance(std::string_view theorem, const SweepConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const int n_hi = std::max(cfg.n_min, cfg.n_max);
  if (theorem == "chang" || theorem == "parseval" || theorem == "maing") {
    const int n = in_range(rng, cfg.n_min, std::min(n_hi, 14));
    const std::size_t size = 1 + uniform_below(rng, (std::size_t{1} << n) / 4);
    const Set a = random_set(rng, n, size);
    const Rational alpha = random_alpha(rng, a);
    if (theorem == "parseval") return check_parseval_spectrum(a, alpha);
    Set spec = large_spectrum(a, alpha);
    if (theorem == "chang") {
      std::vector<Word> order(spec.begin(), spec.end());
      shuffle(order.begin(), order.end(), rng);
      return check_chang(a, alpha, greedy_dissociated(spec, order));
    }
    const int k = pick(rng, cfg.k_values);
    return check_spectrum_energy_lower(a, random_subset(rng, spec, 24), alpha, k);
  }
  if (theorem == "diss" || theorem == "rudin") {
    const int n = in_range(rng, std::max(cfg.n_min, 2), std::min(n_hi, 14));
    const int m = in_range(rng, 1, std::min(cfg.lambda_max, n));
    const Set lambda = random_dissociated(n, m, rng());
    const int p = pick(rng, cfg.p_values);
    if (theorem == "diss") return check_diss_energy(lambda, p);
    std::vector<std::int64_t> coeffs(lambda.size());
    for (auto& c : coeffs) c = static_cast<std::int64_t>(uniform_below(rng, 5)) - 2;
    if (std::all_of(coeffs.begin(), coeffs.end(), [](std::int64_t c) { return c == 0; })) coeffs[0] = 1;
    return check_rudin_even(lambda, coeffs, p);
  }
  if (theorem == "dissd") {
    const int d = pick(rng, cfg.d_values);
    const int p = pick(rng, cfg.p_values);
    const int m = std::max(4 * d * d, in_range(rng, 1, cfg.lambda_max));
    const int n = std::max(m, std::min(n_hi, 24));
    const Set lambda = random_dissociated(n, m, rng());
    return check_sumset_energy(random_subset(rng, dotplus_power(lambda, d), 64), lambda, d, p);
  }
  if (theorem == "exact") {
    const int d = pick(rng, cfg.d_values);
    const int p = pick(rng, cfg.p_values);
    const int m = 2 * d * p + in_range(rng, 0, 2);
    const Set lambda = random_dissociated(m, m, rng());
    return check_full_sumset_lower(lambda, d, p);
  }
  if (theorem == "bourgain") {
    const int n = in_range(rng, std::max(cfg.n_min, 6), std::min(std::max(n_hi, 6), 12));
    const std::size_t size = 1 + uniform_below(rng, (std::size_t{1} << n) / 16);
    const Set a = random_set(rng, n, size);
    const Rational alpha = random_alpha(rng, a);
    const int l = floor_log2(1 / density(a));
    const int d = in_range(rng, 1, std::max(1, l / 4));
    const int m = in_range(rng, 1, n);
    return check_bourgain_intersection(a, random_dissociated(n, m, rng()), alpha, d);
  }
  if (theorem == "majority") {
    const int n = cfg.n ? *cfg.n : in_range(rng, std::max(cfg.n_min, 5), std::min(std::max(n_hi, 5), 16));
    Rational delta;
    if (cfg.delta) {
      delta = *cfg.delta;
    } else {
      const int j = in_range(rng, 4, std::max(4, n - 1));
      delta = Rational(BigInt(1), BigInt(1) << j);
    }
    const MajorityInstance inst = build_majority(n, delta);
    const int d = in_range(rng, 1, inst.k + 1);
    return verify_majority(inst, d).proposition;
  }
  throw PreconditionError("unknown theorem id '" + std::string(theorem) + "'");
}

}  // namespace

std::vector<std::string_view> sweep_theorems() {
  return {"chang", "parseval", "diss", "rudin", "dissd", "exact", "maing", "bourgain", "majority"};
}

std::vector<BoundReport> run_sweep(std::string_view theorem, const SweepConfig& cfg) {
  const auto ids = sweep_theorems();
  if (std::find(ids.begin(), ids.end(), theorem) == ids.end()) {
    throw PreconditionError("unknown theorem id '" + std::string(theorem) + "'");
  }
  if (cfg.instances < 0) throw PreconditionError("sweep: instances must be nonnegative");
  if (cfg.n_min < 1 || cfg.n_max > 24) throw PreconditionError("sweep: need 1 <= n_min and n_max <= 24");
  std::vector<BoundReport> out(static_cast<std::size_t>(cfg.instances));
  parallel_chunks(0, out.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      out[i] = one_instance(theorem, cfg, instance_seed(cfg.seed, i));
      out[i].instance = std::to_string(i) + ":" + out[i].instance;
    }
  }, 1);
  return out;
}

std::string rhs_text(const Interval& rhs) {
  return rhs.lo == rhs.hi ? to_string(rhs.lo) : to_string(rhs.lo) + ".." + to_string(rhs.hi);
}

void write_sweep_csv(std::ostream& out, const std::vector<BoundReport>& rows) {
  out << "instance,lhs,rhs,holds,slack\n";
  for (const BoundReport& r : rows) {
    char slack[64];
    std::snprintf(slack, sizeof slack, "%.6g", r.slack);
    out << '"' << r.instance << "\"," << to_string(r.lhs) << ',' << rhs_text(r.rhs) << ',' << to_string(r.verdict)
        << ',' << slack << '\n';
  }
}

}  // namespace f2ac
