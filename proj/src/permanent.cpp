#include "f2ac/permanent.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "f2ac/energy.hpp"

namespace f2ac {

namespace {

void check_nonnegative(const CombMatrix& h) {
  if (h.size() > 0 && h.minCoeff() < 0) throw PreconditionError("matrix entries must be nonnegative");
}

BigInt subset_count(int y, int x) {
  BigInt total = 0;
  for (int s = 0; s <= x; ++s) total += binomial(static_cast<unsigned>(y), static_cast<unsigned>(s));
  return total;
}

// Product of row totals: an upper bound for every product of row sums.
BigInt row_total_product(const CombMatrix& h) {
  BigInt prod = 1;
  for (Eigen::Index i = 0; i < h.rows(); ++i) prod *= BigInt(h.row(i).sum());
  return prod;
}

BigInt ryser_sum_big(const CombMatrix& h) {
  const int x = static_cast<int>(h.rows());
  const int y = static_cast<int>(h.cols());
  std::vector<BigInt> coeff(static_cast<std::size_t>(x) + 1);
  for (int s = 0; s <= x; ++s) {
    const BigInt c = binomial(static_cast<unsigned>(y - s), static_cast<unsigned>(x - s));
    coeff[static_cast<std::size_t>(s)] = (x - s) % 2 == 0 ? c : BigInt(-c);
  }
  std::vector<std::int64_t> rowsum(static_cast<std::size_t>(x), 0);
  BigInt total = 0;
  auto rec = [&](auto&& self, int start, int size) -> void {
    BigInt prod = 1;
    for (int i = 0; i < x && prod != 0; ++i) prod *= rowsum[static_cast<std::size_t>(i)];
    total += coeff[static_cast<std::size_t>(size)] * prod;
    if (size == x) return;
    for (int j = start; j < y; ++j) {
      for (int i = 0; i < x; ++i) rowsum[static_cast<std::size_t>(i)] += h(i, j);
      self(self, j + 1, size + 1);
      for (int i = 0; i < x; ++i) rowsum[static_cast<std::size_t>(i)] -= h(i, j);
    }
  };
  rec(rec, 0, 0);
  return total;
}

}  // namespace

BigInt permanent_ryser(const CombMatrix& h) {
  check_nonnegative(h);
  const int x = static_cast<int>(h.rows());
  const int y = static_cast<int>(h.cols());
  if (x > y) throw PreconditionError("permanent needs rows <= cols; transpose first");
  if (x == 0) return 1;
  if (subset_count(y, x) > kRyserBudget) throw BudgetExceeded("permanent: column-subset budget exceeded");
  // |total| <= row-total product * sum_s C(y,s) C(y-s,x-s).
  BigInt weight = 0;
  for (int s = 0; s <= x; ++s) {
    weight += binomial(static_cast<unsigned>(y), static_cast<unsigned>(s)) *
              binomial(static_cast<unsigned>(y - s), static_cast<unsigned>(x - s));
  }
  if (row_total_product(h) * weight < (BigInt(1) << 125)) {
    // Coefficients fit 64 bits whenever the whole sum fits 125.
    const int xs = x;
    std::vector<std::int64_t> coeff(static_cast<std::size_t>(xs) + 1);
    for (int s = 0; s <= xs; ++s) {
      const BigInt c = binomial(static_cast<unsigned>(y - s), static_cast<unsigned>(xs - s));
      coeff[static_cast<std::size_t>(s)] = ((xs - s) % 2 == 0 ? 1 : -1) * c.convert_to<std::int64_t>();
    }
    std::vector<std::int64_t> rowsum(static_cast<std::size_t>(xs), 0);
    __int128 total = 0;
    auto rec = [&](auto&& self, int start, int size) -> void {
      __int128 prod = 1;
      for (int i = 0; i < xs && prod != 0; ++i) prod *= rowsum[static_cast<std::size_t>(i)];
      total += static_cast<__int128>(coeff[static_cast<std::size_t>(size)]) * prod;
      if (size == xs) return;
      for (int j = start; j < y; ++j) {
        for (int i = 0; i < xs; ++i) rowsum[static_cast<std::size_t>(i)] += h(i, j);
        self(self, j + 1, size + 1);
        for (int i = 0; i < xs; ++i) rowsum[static_cast<std::size_t>(i)] -= h(i, j);
      }
    };
    rec(rec, 0, 0);
    const bool neg = total < 0;
    const auto mag = neg ? static_cast<unsigned __int128>(-total) : static_cast<unsigned __int128>(total);
    BigInt out = static_cast<std::uint64_t>(mag >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(mag);
    return neg ? BigInt(-out) : out;
  }
  return ryser_sum_big(h);
}

BigInt permanent_expand(const CombMatrix& h) {
  check_nonnegative(h);
  const int x = static_cast<int>(h.rows());
  const int y = static_cast<int>(h.cols());
  if (x > y) throw PreconditionError("permanent needs rows <= cols; transpose first");
  if (y > 64) throw BudgetExceeded("permanent_expand: more than 64 columns");
  BigInt total = 0;
  auto rec = [&](auto&& self, int i, std::uint64_t used, const BigInt& prod) -> void {
    if (i == x) {
      total += prod;
      return;
    }
    for (int j = 0; j < y; ++j) {
      if (((used >> j) & 1U) != 0 || h(i, j) == 0) continue;
      self(self, i + 1, used | (std::uint64_t{1} << j), prod * h(i, j));
    }
  };
  rec(rec, 0, 0, BigInt(1));
  return total;
}

BigInt permanent(const CombMatrix& h) {
  check_nonnegative(h);
  if (h.rows() > h.cols()) throw PreconditionError("permanent needs rows <= cols; transpose first");
  if (subset_count(static_cast<int>(h.cols()), static_cast<int>(h.rows())) <= kRyserBudget) return permanent_ryser(h);
  if (h.cols() <= 22) return permanent_expand(h);
  throw BudgetExceeded("permanent: matrix too large for exact evaluation");
}

FkResult fk_zero_test(const CombMatrix& h) {
  check_nonnegative(h);
  const bool transposed = h.rows() > h.cols();
  const CombMatrix m = transposed ? CombMatrix(h.transpose()) : h;
  const int x = static_cast<int>(m.rows());
  const int y = static_cast<int>(m.cols());

  // Kuhn's augmenting paths, rows in index order.
  std::vector<int> match_col(static_cast<std::size_t>(y), -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int i) -> bool {
    for (int j = 0; j < y; ++j) {
      if (m(i, j) == 0 || seen[static_cast<std::size_t>(j)]) continue;
      seen[static_cast<std::size_t>(j)] = 1;
      if (match_col[static_cast<std::size_t>(j)] < 0 || self(self, match_col[static_cast<std::size_t>(j)])) {
        match_col[static_cast<std::size_t>(j)] = i;
        return true;
      }
    }
    return false;
  };
  int free_row = -1;
  for (int i = 0; i < x; ++i) {
    seen.assign(static_cast<std::size_t>(y), 0);
    if (!augment(augment, i)) {
      free_row = i;
      break;
    }
  }

  FkResult out;
  if (free_row < 0) {
    for (int j = 0; j < y; ++j) {
      const int i = match_col[static_cast<std::size_t>(j)];
      if (i < 0) continue;
      out.diagonal.emplace_back(transposed ? j : i, transposed ? i : j);
    }
    std::sort(out.diagonal.begin(), out.diagonal.end());
    return out;
  }

  // Rows reachable from the free row by alternating paths have fewer
  // neighbours than members (Hall violation).
  std::vector<char> row_reached(static_cast<std::size_t>(x), 0);
  std::vector<char> col_reached(static_cast<std::size_t>(y), 0);
  std::vector<int> queue{free_row};
  row_reached[static_cast<std::size_t>(free_row)] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int i = queue[head];
    for (int j = 0; j < y; ++j) {
      if (m(i, j) == 0 || col_reached[static_cast<std::size_t>(j)]) continue;
      col_reached[static_cast<std::size_t>(j)] = 1;
      const int next = match_col[static_cast<std::size_t>(j)];
      if (next >= 0 && !row_reached[static_cast<std::size_t>(next)]) {
        row_reached[static_cast<std::size_t>(next)] = 1;
        queue.push_back(next);
      }
    }
  }
  std::vector<int> rows;
  std::vector<int> cols;
  for (int i = 0; i < x; ++i) {
    if (row_reached[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  for (int j = 0; j < y; ++j) {
    if (!col_reached[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  // Trim to sizes summing to y + 1, keeping both parts nonempty.
  while (static_cast<int>(rows.size() + cols.size()) > y + 1 && rows.size() > 1) rows.pop_back();
  while (static_cast<int>(rows.size() + cols.size()) > y + 1 && cols.size() > 1) cols.pop_back();
  out.zero = true;
  out.zero_rows = transposed ? cols : rows;
  out.zero_cols = transposed ? rows : cols;
  return out;
}

bool verify_fk(const CombMatrix& h, const FkResult& r) {
  const auto big = std::max(h.rows(), h.cols());
  const auto small = std::min(h.rows(), h.cols());
  if (r.zero) {
    if (static_cast<Eigen::Index>(r.zero_rows.size() + r.zero_cols.size()) != big + 1) return false;
    for (int i : r.zero_rows) {
      for (int j : r.zero_cols) {
        if (i < 0 || i >= h.rows() || j < 0 || j >= h.cols() || h(i, j) != 0) return false;
      }
    }
    return true;
  }
  if (static_cast<Eigen::Index>(r.diagonal.size()) != small) return false;
  std::vector<int> rs;
  std::vector<int> cs;
  for (const auto& [i, j] : r.diagonal) {
    if (i < 0 || i >= h.rows() || j < 0 || j >= h.cols() || h(i, j) == 0) return false;
    rs.push_back(i);
    cs.push_back(j);
  }
  std::sort(rs.begin(), rs.end());
  std::sort(cs.begin(), cs.end());
  return std::adjacent_find(rs.begin(), rs.end()) == rs.end() && std::adjacent_find(cs.begin(), cs.end()) == cs.end();
}

CombMatrix delete_unit_columns(const CombMatrix& h, std::vector<int>* kept) {
  std::vector<int> cols;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    if (h.col(j).sum() != 1) cols.push_back(static_cast<int>(j));
  }
  CombMatrix out(h.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = h.col(cols[c]);
  if (kept != nullptr) *kept = std::move(cols);
  return out;
}

ReducedPermanentReport reduced_permanent_check(const CombMatrix& h) {
  check_nonnegative(h);
  ReducedPermanentReport rep;
  const Eigen::Index p = h.rows();
  rep.rows_ok = p > 0 && (h.rowwise().sum().array() >= 2).all();
  rep.cols_ok = h.cols() > 0 && (h.colwise().sum().array() >= 1).all();
  rep.total_ok = h.sum() == 2 * p;
  rep.hypotheses_hold = rep.rows_ok && rep.cols_ok && rep.total_ok;
  if (!rep.hypotheses_hold) return rep;
  const CombMatrix h0 = delete_unit_columns(h, &rep.kept_columns);
  if (h0.cols() == 0) {
    // Empty matrix: the empty diagonal.
    rep.per_h0_positive = true;
    return rep;
  }
  rep.certificate = fk_zero_test(h0);
  rep.per_h0_positive = !rep.certificate.zero;
  return rep;
}

ExhaustiveSummary lemma_per0_exhaustive(int p, int r) {
  if (p < 1 || r < 1 || p * r > 16) throw PreconditionError("lemma_per0_exhaustive: need 1 <= p*r <= 16");
  ExhaustiveSummary sum;
  sum.p = p;
  sum.r = r;
  const int cells = p * r;
  std::uint64_t total = 1;
  for (int c = 0; c < cells; ++c) total *= 3;
  CombMatrix h(p, r);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t v = code;
    for (int c = 0; c < cells; ++c) {
      h(c / r, c % r) = static_cast<std::int64_t>(v % 3);
      v /= 3;
    }
    ++sum.examined;
    const ReducedPermanentReport rep = reduced_permanent_check(h);
    if (!rep.hypotheses_hold) continue;
    ++sum.satisfying;
    if (!*rep.per_h0_positive) ++sum.falsified;
    // Explicit permanent of H_0 in its rows <= cols orientation.
    const CombMatrix h0 = delete_unit_columns(h);
    if (h0.cols() > 0) {
      const CombMatrix m = h0.rows() <= h0.cols() ? h0 : CombMatrix(h0.transpose());
      if ((permanent(m) > 0) != *rep.per_h0_positive) ++sum.oracle_mismatches;
    }
  }
  return sum;
}

PiReport pi_value(const std::vector<int>& ts, int p, const Rational& delta0) {
  if (p < 1) throw PreconditionError("pi_value: p must be positive");
  if (ts.empty()) throw PreconditionError("pi_value: empty tuple");
  long sum = 0;
  for (int t : ts) {
    if (t < 2) throw PreconditionError("pi_value: every t_j must be at least 2");
    sum += t;
  }
  if (sum != 2L * p) throw PreconditionError("pi_value: the t_j must sum to 2p");

  PiReport rep;
  rep.delta0 = delta0;
  const int r = static_cast<int>(ts.size());
  if (delta0 <= 0) rep.violated_hypotheses.push_back("delta0 > 0");
  if (Rational(r) < Rational(p) - delta0) rep.violated_hypotheses.push_back("r >= p - delta0");
  if (Rational(p) < 2 * delta0 + 3) rep.violated_hypotheses.push_back("p >= 2 delta0 + 3");
  rep.hypotheses_hold = rep.violated_hypotheses.empty();

  rep.T = *std::max_element(ts.begin(), ts.end());
  for (int i = 0; i <= rep.T - 2; ++i) {
    rep.alpha.push_back(static_cast<int>(std::count_if(ts.begin(), ts.end(), [&](int t) { return t >= rep.T - i; })));
  }
  // Cutoff z: prefix(z) <= p < prefix(z + 1).
  rep.z_found = false;
  int prefix = 0;
  for (int z = 0; z < static_cast<int>(rep.alpha.size()); ++z) {
    if (prefix <= p && p < prefix + rep.alpha[static_cast<std::size_t>(z)]) {
      rep.z = z;
      rep.q_z = p - prefix;
      rep.z_found = true;
      break;
    }
    prefix += rep.alpha[static_cast<std::size_t>(z)];
  }
  if (rep.z_found) {
    rep.pi = 1;
    for (int i = 0; i < rep.z; ++i) rep.pi *= ipow(BigInt(rep.T - i), static_cast<unsigned>(rep.alpha[static_cast<std::size_t>(i)]));
    rep.pi *= ipow(BigInt(rep.T - rep.z), static_cast<unsigned>(rep.q_z));
  } else {
    rep.z = 0;
    rep.q_z = p;
    rep.pi = ipow(BigInt(rep.T), static_cast<unsigned>(p));
  }

  const auto up = static_cast<unsigned>(p);
  if (delta0 >= 1) {
    // pi <= 2^{3p} (a/b)^{4a/b}  <=>  pi^b b^{4a} <= 2^{3pb} a^{4a}.
    const BigInt a = boost::multiprecision::numerator(delta0);
    const BigInt b = boost::multiprecision::denominator(delta0);
    if (a > 4096 || b > 4096) throw PreconditionError("pi_value: delta0 numerator/denominator too large");
    const auto ua = a.convert_to<unsigned>();
    const auto ub = b.convert_to<unsigned>();
    const BigInt lhs = ipow(rep.pi, ub) * ipow(b, 4 * ua);
    const BigInt rhs = (BigInt(1) << (3 * up * ub)) * ipow(a, 4 * ua);
    rep.holds = lhs <= rhs;
    rep.bound = iroot_floor(rhs / ipow(b, 4 * ua), ub);
  } else {
    rep.bound = BigInt(1) << (2 * up);
    rep.holds = rep.pi <= rep.bound;
  }
  return rep;
}

SophisticatedReport sophisticated_bound(const std::vector<Set>& es, const std::vector<std::vector<int>>& classes,
                                        const Set& lambda) {
  if (es.empty() || es.size() % 2 != 0) throw PreconditionError("sophisticated_bound needs 2p sets");
  const int p = static_cast<int>(es.size() / 2);
  if (p > 4) throw PreconditionError("sophisticated_bound supports p <= 4");
  for (const Set& e : es) {
    if (e.dim() != lambda.dim()) throw DimensionError("sophisticated_bound: dimension mismatch");
    if (!is_subset(e, lambda)) throw PreconditionError("sophisticated_bound: every E_i must lie in Lambda");
  }
  std::vector<int> owner(static_cast<std::size_t>(2 * p), -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) throw PreconditionError("sophisticated_bound: empty class");
    for (int i : classes[c]) {
      if (i < 0 || i >= 2 * p || owner[static_cast<std::size_t>(i)] >= 0) {
        throw PreconditionError("sophisticated_bound: classes must partition [2p]");
      }
      owner[static_cast<std::size_t>(i)] = static_cast<int>(c);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw PreconditionError("sophisticated_bound: classes must cover [2p]");
  }

  SophisticatedReport rep;
  rep.p = p;
  rep.family = in_family(lambda, FamilySpec::plain(lambda.dim(), 2 * p));
  if (rep.family != FamilyStatus::kTrue) {
    throw PreconditionError(std::string("sophisticated_bound: Lambda in Lambda(2p) is ") +
                            std::string(to_string(rep.family)));
  }
  rep.z = energy_multiset(es);

  const int m = 2 * p;
  rep.bound = 0;
  for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
    if (__builtin_popcount(mask) != p) continue;
    bool hits = true;
    for (const auto& cls : classes) {
      if (cls.size() < 2) continue;
      if (std::none_of(cls.begin(), cls.end(), [&](int i) { return ((mask >> i) & 1U) != 0; })) {
        hits = false;
        break;
      }
    }
    if (!hits) continue;
    std::vector<int> in;
    std::vector<int> out;
    for (int i = 0; i < m; ++i) (((mask >> i) & 1U) != 0 ? in : out).push_back(i);
    CombMatrix mat(p, p);
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        mat(a, b) = static_cast<std::int64_t>(
            intersection_size(es[static_cast<std::size_t>(in[static_cast<std::size_t>(a)])],
                              es[static_cast<std::size_t>(out[static_cast<std::size_t>(b)])]));
      }
    }
    rep.bound += permanent(mat);
    ++rep.subsets_used;
  }
  rep.holds = rep.z <= rep.bound;

  rep.corollary_lhs = rep.z * rep.z;
  const BigInt pf = factorial(static_cast<unsigned>(p));
  rep.corollary_rhs = (BigInt(1) << (4 * p)) * pf * pf;
  for (const Set& e : es) rep.corollary_rhs *= BigInt(e.size());
  rep.corollary_holds = rep.corollary_lhs <= rep.corollary_rhs;
  return rep;
}

CombMatrix parse_matrix(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      return true;
    }
    return false;
  };
  auto read_ints = [&](std::size_t expected) {
    std::istringstream ss(line);
    std::vector<std::int64_t> v;
    std::string tok;
    while (ss >> tok) {
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ParseError(line_no, "expected a nonnegative integer, got '" + tok + "'");
      }
      try {
        v.push_back(std::stoll(tok));
      } catch (const std::exception&) {
        throw ParseError(line_no, "integer out of range: '" + tok + "'");
      }
    }
    if (v.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " integers, got " + std::to_string(v.size()));
    }
    return v;
  };
  if (!next_line()) throw ParseError(0, "missing \"x y\" header");
  const auto dims = read_ints(2);
  if (dims[0] > 64 || dims[1] > 64) throw ParseError(line_no, "matrix dimensions above 64 are not supported");
  CombMatrix h(dims[0], dims[1]);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (!next_line()) throw ParseError(line_no, "expected " + std::to_string(h.rows()) + " rows");
    const auto row = read_ints(static_cast<std::size_t>(h.cols()));
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = row[static_cast<std::size_t>(j)];
  }
  if (next_line()) throw ParseError(line_no, "unexpected extra row");
  return h;
}

CombMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  try {
    return parse_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string serialize_matrix(const CombMatrix& h) {
  std::ostringstream out;
  out << h.rows() << ' ' << h.cols() << '\n';
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) out << (j > 0 ? " " : "") << h(i, j);
    out << '\n';
  }
  return out.str();
}

}  // namespace f2ac
