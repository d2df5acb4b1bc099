#pragma once

// Hafnians of dense symmetric matrices and of the repeated-index matrices B_I.
//
// Three evaluation paths share one contract:
//   hafnian_reference  recursive perfect-matching sum, (m-1)!! terms (oracle)
//   hafnian_trace      subset inclusion-exclusion with power traces,
//                      O(2^{m/2} m^3)
//   hafnian_repeated   finite-difference moment formula for B_I, cost
//                      ~ prod_k (i_k + 1), independent of 2^{|I|/2}
// hafnian_multiindex picks the cheapest path deterministically from the
// index alone, so cached and recomputed values are bit-identical.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "gbspe/linalg.hpp"
#include "gbspe/multiindex.hpp"

namespace gbspe {

double hafnian_reference(const SymmetricMatrix& a);
double hafnian_trace(const SymmetricMatrix& a);

/// Production dense evaluation: matching sum for m <= 6, power-trace above.
/// Throws std::invalid_argument for odd m; the empty matrix has hafnian 1.
double hafnian_dense(const SymmetricMatrix& a);

/// The |I| x |I| matrix repeating row/column k of B exactly i_k times.
SymmetricMatrix expand_multiindex(const SymmetricMatrix& b, const MultiIndex& index);

/// Haf(B_I) from Gaussian moment finite differences:
///   Haf(B_I) = 1/s! sum_{0<=v<=I} (-1)^{|v|} prod_k C(i_k, v_k) (h^T B h / 2)^s,
/// h_k = i_k/2 - v_k, s = |I|/2. Accumulated in extended precision.
double hafnian_repeated(const SymmetricMatrix& b, const MultiIndex& index);

/// Work estimate (inner-loop operations) of the path hafnian_multiindex uses.
double hafnian_cost(const MultiIndex& index);

/// Memo of Haf(B_I) keyed by (matrix fingerprint, I). Thread-safe.
class HafnianCache {
 public:
  std::optional<double> find(std::uint64_t fingerprint, const MultiIndex& index) const;
  void insert(std::uint64_t fingerprint, const MultiIndex& index, double value);
  std::size_t size() const;

  struct LoadReport {
    std::size_t records = 0;
    std::uintmax_t truncated_bytes = 0;
  };

  /// Reads an append-only cache log. A corrupt or partial tail is cut off
  /// the file and reported; entries before it are kept.
  LoadReport load(const std::filesystem::path& path);

  /// Appends every entry inserted since the last load/append.
  std::size_t append_new_entries(const std::filesystem::path& path);

 private:
  struct Key {
    std::uint64_t fingerprint;
    MultiIndex index;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };

  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, double, KeyHash> values_;
  std::vector<Key> pending_;
};

/// Haf(B_I). |I| must be even and I must have length N.
double hafnian_multiindex(const SymmetricMatrix& b, const MultiIndex& index, HafnianCache& cache);
double hafnian_multiindex(const SymmetricMatrix& b, const MultiIndex& index);

/// Sign of Haf(B_I); values within 1e-14 of zero report 0.
int hafnian_sign(const SymmetricMatrix& b, const MultiIndex& index, HafnianCache& cache);

inline constexpr double kHafnianZeroTolerance = 1e-14;
int sign_of(double hafnian_value);

/// Haf((tB)_I) = t^K Haf(B_I) for every |I| = 2K, in canonical pattern order.
/// Only unscaled hafnians enter the cache.
struct DegreeHafnians {
  std::shared_ptr<const std::vector<MultiIndex>> patterns;
  std::vector<double> values;
};

DegreeHafnians batch_hafnians_degree(const SymmetricMatrix& b, double t, int half_degree, HafnianCache& cache);

}  // namespace gbspe
