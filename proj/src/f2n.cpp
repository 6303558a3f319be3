#include "f2ac/f2n.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace f2ac {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw DimensionError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " + std::to_string(dim));
  }
}

Element::Element(Word bits, int dim) : bits_(bits), dim_(dim) {
  check_dim(dim);
  if ((bits & ~dim_mask(dim)) != 0) throw DimensionError("element has bits outside dimension " + std::to_string(dim));
}

Element Element::unit(int dim, int coord) {
  if (coord < 1 || coord > dim) throw std::out_of_range("unit vector coordinate out of range");
  return Element(Word{1} << (coord - 1), dim);
}

int Element::weight() const noexcept { return __builtin_popcount(bits_); }

Element add(const Element& x, const Element& y) {
  if (x.dim() != y.dim()) throw DimensionError("add: dimension mismatch");
  return Element(x.bits() ^ y.bits(), x.dim());
}

int dot(const Element& r, const Element& x) {
  if (r.dim() != x.dim()) throw DimensionError("dot: dimension mismatch");
  return dot(r.bits(), x.bits());
}

std::string to_bitstring(Word bits, int dim) {
  std::string s(static_cast<std::size_t>(dim), '0');
  for (int i = 0; i < dim; ++i) {
    if ((bits >> i) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

Word parse_bitstring(std::string_view text, int dim) {
  if (static_cast<int>(text.size()) != dim) {
    throw std::invalid_argument("bad line length: expected " + std::to_string(dim) + " characters, got " +
                                std::to_string(text.size()));
  }
  Word bits = 0;
  for (int i = 0; i < dim; ++i) {
    const char c = text[static_cast<std::size_t>(i)];
    if (c == '1') {
      bits |= Word{1} << i;
    } else if (c != '0') {
      throw std::invalid_argument(std::string("bad character '") + c + "'");
    }
  }
  return bits;
}

Set::Set(int dim) : dim_(dim) { check_dim(dim); }

Set::Set(int dim, std::vector<Word> elems) : dim_(dim), elems_(std::move(elems)) {
  check_dim(dim);
  const Word mask = dim_mask(dim);
  for (Word w : elems_) {
    if ((w & ~mask) != 0) throw DimensionError("set element has bits outside dimension " + std::to_string(dim));
  }
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

Set Set::full(int dim) {
  check_dim(dim);
  std::vector<Word> all(std::size_t{1} << dim);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Word>(i);
  return Set(dim, std::move(all));
}

bool Set::contains(Word x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

std::ptrdiff_t Set::index_of(Word x) const {
  const auto it = std::lower_bound(elems_.begin(), elems_.end(), x);
  if (it == elems_.end() || *it != x) return -1;
  return it - elems_.begin();
}

namespace {

void same_dim(const Set& a, const Set& b, const char* op) {
  if (a.dim() != b.dim()) throw DimensionError(std::string(op) + ": dimension mismatch");
}

}  // namespace

Set set_union(const Set& a, const Set& b) {
  same_dim(a, b, "set_union");
  std::vector<Word> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Set(a.dim(), std::move(out));
}

Set set_intersection(const Set& a, const Set& b) {
  same_dim(a, b, "set_intersection");
  std::vector<Word> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Set(a.dim(), std::move(out));
}

Set set_difference(const Set& a, const Set& b) {
  same_dim(a, b, "set_difference");
  std::vector<Word> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Set(a.dim(), std::move(out));
}

bool is_subset(const Set& a, const Set& b) {
  same_dim(a, b, "is_subset");
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::size_t intersection_size(const Set& a, const Set& b) {
  same_dim(a, b, "intersection_size");
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Set translate(const Set& a, Word x) {
  std::vector<Word> out;
  out.reserve(a.size());
  for (Word w : a) out.push_back(w ^ x);
  return Set(a.dim(), std::move(out));
}

Set sumset(const Set& a, const Set& b) {
  same_dim(a, b, "sumset");
  std::vector<Word> out;
  out.reserve(a.size() * b.size());
  for (Word x : a) {
    for (Word y : b) out.push_back(x ^ y);
  }
  return Set(a.dim(), std::move(out));
}

Set dotplus(std::span<const Set> sets, std::uint64_t budget) {
  if (sets.empty()) throw std::invalid_argument("dotplus: empty list of sets");
  const int dim = sets.front().dim();
  for (const Set& s : sets) {
    if (s.dim() != dim) throw DimensionError("dotplus: dimension mismatch");
  }
  const bool identical = std::all_of(sets.begin(), sets.end(), [&](const Set& s) { return s == sets.front(); });
  if (identical) return dotplus_power(sets.front(), static_cast<int>(sets.size()), budget);

  const std::size_t d = sets.size();
  std::vector<Word> chosen(d);
  std::vector<Word> out;
  std::uint64_t visited = 0;
  auto recurse = [&](auto&& self, std::size_t depth, Word sum) -> void {
    if (depth == d) {
      if (++visited > budget) throw BudgetExceeded("dotplus: tuple budget exceeded");
      out.push_back(sum);
      return;
    }
    for (Word w : sets[depth]) {
      if (std::find(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(depth), w) !=
          chosen.begin() + static_cast<std::ptrdiff_t>(depth)) {
        continue;
      }
      chosen[depth] = w;
      self(self, depth + 1, sum ^ w);
    }
  };
  recurse(recurse, 0, 0);
  return Set(dim, std::move(out));
}

Set dotplus_power(const Set& a, int d, std::uint64_t budget) {
  if (d < 1) throw std::invalid_argument("dotplus_power: d must be positive");
  const std::size_t m = a.size();
  if (static_cast<std::size_t>(d) > m) return Set(a.dim());
  if (binomial(static_cast<unsigned>(m), static_cast<unsigned>(d)) > budget) {
    throw BudgetExceeded("dotplus_power: C(|A|, d) exceeds budget");
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Word> out;
  for (;;) {
    Word sum = 0;
    for (std::size_t i : idx) sum ^= a[i];
    out.push_back(sum);
    // next combination
    std::ptrdiff_t pos = d - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - static_cast<std::size_t>(d) + static_cast<std::size_t>(pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < idx.size(); ++i) idx[i] = idx[i - 1] + 1;
  }
  return Set(a.dim(), std::move(out));
}

Set linear_span(int dim, std::span<const Word> generators) {
  std::vector<Word> span{0};
  for (Word g : generators) {
    if (std::find(span.begin(), span.end(), g) != span.end()) continue;
    const std::size_t n = span.size();
    for (std::size_t i = 0; i < n; ++i) span.push_back(span[i] ^ g);
    std::sort(span.begin(), span.end());
  }
  return Set(dim, std::move(span));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Set parse_set(std::istream& in) {
  std::string raw;
  int line_no = 0;
  int dim = 0;
  std::vector<std::pair<Word, int>> elems;  // (element, line)
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (dim == 0) {
      try {
        std::size_t used = 0;
        dim = std::stoi(line, &used);
        if (used != line.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(line_no, "expected dimension header, got '" + line + "'");
      }
      if (dim < 1 || dim > kMaxDim) throw ParseError(line_no, "dimension out of range [1, 30]");
      continue;
    }
    try {
      elems.emplace_back(parse_bitstring(line, dim), line_no);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (dim == 0) throw ParseError(0, "missing dimension header");
  std::stable_sort(elems.begin(), elems.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Word> words;
  words.reserve(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i > 0 && elems[i].first == elems[i - 1].first) {
      throw ParseError(elems[i].second, "duplicate element " + to_bitstring(elems[i].first, dim));
    }
    words.push_back(elems[i].first);
  }
  return Set(dim, std::move(words));
}

Set parse_set(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_set(in);
}

Set read_set_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open set file " + path.string());
  try {
    return parse_set(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string serialize_set(const Set& s) {
  std::string out = std::to_string(s.dim()) + "\n";
  for (Word w : s) {
    out += to_bitstring(w, s.dim());
    out += '\n';
  }
  return out;
}

void write_set_file(const std::filesystem::path& path, const Set& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write set file " + path.string());
  out << serialize_set(s);
}

}  // namespace f2ac
