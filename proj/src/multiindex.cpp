#include "gbspe/multiindex.hpp"

#include <charconv>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "gbspe/errors.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
  degree_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::parse(std::string_view text) {
  std::vector<int> entries;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || value < 0)
      throw ConfigError("invalid multi-index '" + std::string(text) + "'");
    entries.push_back(value);
    pos = comma + 1;
  }
  return MultiIndex(std::move(entries));
}

std::string MultiIndex::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(entries_[k]);
  }
  return out;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& index) const noexcept {
  std::uint64_t h = mix64(index.size());
  for (int e : index.entries()) h = mix64(h ^ static_cast<std::uint64_t>(e));
  return static_cast<std::size_t>(h);
}

MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw std::invalid_argument("multi-index add: length mismatch");
  std::vector<int> sum(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) sum[k] = a[k] + b[k];
  return MultiIndex(std::move(sum));
}

namespace {

void enumerate_into(std::vector<int>& prefix, std::size_t position, int remaining, std::vector<MultiIndex>& out) {
  if (position + 1 == prefix.size()) {
    prefix[position] = remaining;
    out.emplace_back(prefix);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    prefix[position] = e;
    enumerate_into(prefix, position + 1, remaining - e, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_degree(std::size_t n, int degree) {
  if (n == 0) throw std::invalid_argument("enumerate_degree: N must be positive");
  if (degree < 0) throw std::invalid_argument("enumerate_degree: degree must be nonnegative");
  std::vector<MultiIndex> out;
  out.reserve(binomial(static_cast<std::uint64_t>(degree) + n - 1, n - 1));
  std::vector<int> prefix(n, 0);
  enumerate_into(prefix, 0, degree, out);
  return out;
}

std::shared_ptr<const std::vector<MultiIndex>> degree_patterns(std::size_t n, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const std::vector<MultiIndex>>> memo;
  std::lock_guard lock(mutex);
  auto& slot = memo[{n, degree}];
  if (!slot) slot = std::make_shared<const std::vector<MultiIndex>>(enumerate_degree(n, degree));
  return slot;
}

double factorial(const MultiIndex& index) {
  std::uint64_t exact = 1;
  bool overflow = false;
  long double fallback = 1.0L;
  for (int e : index.entries()) {
    for (int f = 2; f <= e; ++f) {
      fallback *= f;
      if (!overflow && __builtin_mul_overflow(exact, static_cast<std::uint64_t>(f), &exact)) overflow = true;
    }
  }
  return overflow ? static_cast<double>(fallback) : static_cast<double>(exact);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i at every step.
    const std::uint64_t g = std::gcd(result, i);
    result = (result / g) * ((n - k + i) / (i / g));
  }
  return result;
}

std::uint64_t count_sigma(int modes, int half_degree) {
  if (modes < 1 || half_degree < 0) throw std::invalid_argument("count_sigma: invalid shape");
  return binomial(static_cast<std::uint64_t>(2 * half_degree + modes - 1), static_cast<std::uint64_t>(modes - 1));
}

}  // namespace gbspe

namespace gbspe {

std::size_t lex_rank(std::span<const int> entries, int degree) {
  const std::size_t n = entries.size();
  std::size_t rank = 0;
  int remaining = degree;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::uint64_t tail = n - k - 1;  // positions after k
    // Tuples with a smaller value e at position k come first; the tail then
    // holds remaining - e spread over `tail` positions.
    for (int e = 0; e < entries[k]; ++e)
      rank += binomial(static_cast<std::uint64_t>(remaining - e) + tail - 1, tail - 1);
    remaining -= entries[k];
  }
  return rank;
}

}  // namespace gbspe
