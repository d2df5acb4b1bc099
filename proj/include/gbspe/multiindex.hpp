#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gbspe {

/// Photon pattern I = (i_1, ..., i_N) with nonnegative entries.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zeros(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  /// Parses "i1,i2,...,iN". Whitespace around entries is ignored.
  static MultiIndex parse(std::string_view text);

  std::size_t size() const noexcept { return entries_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t k) const { return entries_[k]; }
  std::span<const int> entries() const noexcept { return entries_; }

  /// "i1,i2,...,iN".
  std::string to_string() const;

  // Lexicographic on the entries.
  auto operator<=>(const MultiIndex& other) const { return entries_ <=> other.entries_; }
  bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& index) const noexcept;
};

/// Entrywise sum; throws std::invalid_argument on a length mismatch.
MultiIndex add(const MultiIndex& a, const MultiIndex& b);
inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) { return add(a, b); }

/// Every I in N^n with |I| = degree, in ascending lexicographic order.
std::vector<MultiIndex> enumerate_degree(std::size_t n, int degree);

/// Shared, memoised enumeration (same contents as enumerate_degree).
std::shared_ptr<const std::vector<MultiIndex>> degree_patterns(std::size_t n, int degree);

/// I! = i_1! ... i_N!. Exact while the product fits in 64 bits, otherwise
/// accumulated in extended precision.
double factorial(const MultiIndex& index);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// sigma(N, K) = #{ |I| = 2K } = C(2K + N - 1, N - 1).
std::uint64_t count_sigma(int modes, int half_degree);

}  // namespace gbspe

namespace gbspe {

/// Position of `entries` within enumerate_degree(entries.size(), degree),
/// computed combinatorially. Entries must sum to `degree`.
std::size_t lex_rank(std::span<const int> entries, int degree);

}  // namespace gbspe
