#pragma once

// The group F_2^n: points as n-bit words, finite sets as sorted word arrays.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "f2ac/numeric.hpp"

namespace f2ac {

using Word = std::uint32_t;
inline constexpr int kMaxDim = 30;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A malformed set or matrix file; line is 1-based (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

void check_dim(int dim);
inline Word dim_mask(int dim) { return dim >= 32 ? ~Word{0} : ((Word{1} << dim) - 1); }

/// A point of F_2^n. Coordinate i (1-based) is bit i-1 of the word.
class Element {
 public:
  Element(Word bits, int dim);

  static Element zero(int dim) { return Element(0, dim); }
  /// Standard basis vector e_coord, 1 <= coord <= dim.
  static Element unit(int dim, int coord);

  Word bits() const noexcept { return bits_; }
  int dim() const noexcept { return dim_; }
  int weight() const noexcept;

  friend bool operator==(const Element&, const Element&) = default;

 private:
  Word bits_;
  int dim_;
};

/// Group law (bitwise XOR). Throws DimensionError on mismatch.
Element add(const Element& x, const Element& y);
inline Element operator+(const Element& x, const Element& y) { return add(x, y); }
/// Character pairing <r, x>: parity of popcount(r AND x).
int dot(const Element& r, const Element& x);
inline int dot(Word r, Word x) noexcept { return __builtin_parity(r & x); }

/// Rendering as {0,1}^n with the leftmost character = coordinate 1.
std::string to_bitstring(Word bits, int dim);
inline std::string to_bitstring(const Element& x) { return to_bitstring(x.bits(), x.dim()); }
/// Inverse of to_bitstring; throws std::invalid_argument on bad input.
Word parse_bitstring(std::string_view text, int dim);

/// A finite subset of F_2^n, stored strictly sorted.
class Set {
 public:
  explicit Set(int dim = 1);
  /// Sorts and merges duplicates; validates every word against dim.
  Set(int dim, std::vector<Word> elems);
  Set(int dim, std::initializer_list<Word> elems) : Set(dim, std::vector<Word>(elems)) {}

  static Set full(int dim);
  static Set singleton(const Element& x) { return Set(x.dim(), {x.bits()}); }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  bool contains(Word x) const;
  bool contains(const Element& x) const { return x.dim() == dim_ && contains(x.bits()); }
  /// Position of x in sorted order, or -1.
  std::ptrdiff_t index_of(Word x) const;

  std::span<const Word> words() const noexcept { return elems_; }
  Word operator[](std::size_t i) const { return elems_[i]; }
  auto begin() const noexcept { return elems_.begin(); }
  auto end() const noexcept { return elems_.end(); }

  friend bool operator==(const Set&, const Set&) = default;

 private:
  int dim_;
  std::vector<Word> elems_;
};

Set set_union(const Set& a, const Set& b);
Set set_intersection(const Set& a, const Set& b);
Set set_difference(const Set& a, const Set& b);
bool is_subset(const Set& a, const Set& b);
std::size_t intersection_size(const Set& a, const Set& b);
/// x + A.
Set translate(const Set& a, Word x);
/// Ordinary sumset A + B.
Set sumset(const Set& a, const Set& b);

/// A_1 ∔ ... ∔ A_d: all sums a_1 + ... + a_d with a_i in A_i and the a_i
/// pairwise distinct as elements. Throws on an empty list or when the
/// enumeration exceeds budget tuples.
Set dotplus(std::span<const Set> sets, std::uint64_t budget = 100'000'000);
/// d-fold distinct sumset of a single set: sums of d distinct members.
Set dotplus_power(const Set& a, int d, std::uint64_t budget = 100'000'000);

/// Span over GF(2) of the given words.
Set linear_span(int dim, std::span<const Word> generators);

/// Set file: first non-comment line is the dimension, then one bitstring per
/// line. Blank lines and lines starting with '#' are skipped. Duplicate
/// elements are an error.
Set parse_set(std::istream& in);
Set parse_set(std::string_view text);
Set read_set_file(const std::filesystem::path& path);
/// Canonical form: dimension line then elements in ascending word order.
std::string serialize_set(const Set& s);
void write_set_file(const std::filesystem::path& path, const Set& s);

}  // namespace f2ac
