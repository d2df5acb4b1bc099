#include "gbspe/hafnian.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "gbspe/errors.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

namespace {

void require_even(std::size_t m, const char* where) {
  if (m % 2 != 0) throw std::invalid_argument(std::string(where) + ": odd matrix size has no perfect matching");
}

double matching_sum(const SymmetricMatrix& a, std::vector<std::size_t>& idx, std::size_t start) {
  if (start == idx.size()) return 1.0;
  const std::size_t first = idx[start];
  double total = 0.0;
  for (std::size_t j = start + 1; j < idx.size(); ++j) {
    const double w = a(first, idx[j]);
    if (w == 0.0) continue;
    std::swap(idx[start + 1], idx[j]);
    total += w * matching_sum(a, idx, start + 2);
    std::swap(idx[start + 1], idx[j]);
  }
  return total;
}

long double ipow(long double base, int exponent) {
  long double result = 1.0L;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

// Square-matrix product c = a * b, all k x k, row-major.
void multiply(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& c, std::size_t k) {
  std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k * k), 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a[i * k + l];
      if (ail == 0.0) continue;
      const double* brow = &b[l * k];
      double* crow = &c[i * k];
      for (std::size_t j = 0; j < k; ++j) crow[j] += ail * brow[j];
    }
}

double repeated_cost(const MultiIndex& index) {
  double terms = 1.0;
  double support = 0.0;
  bool first = true;
  for (int e : index.entries()) {
    if (e == 0) continue;
    support += 1.0;
    terms *= first ? static_cast<double>(e / 2 + 1) : static_cast<double>(e + 1);
    first = false;
  }
  return terms * (support * support + 1.0);
}

double trace_cost(int m) {
  if (m == 0) return 1.0;
  const double n = m / 2;
  return std::ldexp(1.0, m / 2) * (std::ceil(n / 2) * m * m * m / 8.0 + n * m * m);
}

double reference_cost(int m) {
  double terms = 1.0;
  for (int k = m - 1; k > 1; k -= 2) terms *= k;
  return terms * (m / 2);
}

enum class Path { trivial, reference, trace, repeated };

Path choose_path(const MultiIndex& index) {
  const int m = index.degree();
  if (m <= 2) return Path::trivial;
  const double rep = repeated_cost(index);
  const double dense = m <= 6 ? reference_cost(m) : trace_cost(m);
  if (rep < dense) return Path::repeated;
  return m <= 6 ? Path::reference : Path::trace;
}

}  // namespace

double hafnian_reference(const SymmetricMatrix& a) {
  require_even(a.dimension(), "hafnian_reference");
  std::vector<std::size_t> idx(a.dimension());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return matching_sum(a, idx, 0);
}

double hafnian_trace(const SymmetricMatrix& a) {
  const std::size_t m = a.dimension();
  require_even(m, "hafnian_trace");
  if (m == 0) return 1.0;
  const std::size_t n = m / 2;
  if (n > 30) throw std::invalid_argument("hafnian_trace: matrix too large");
  const std::size_t half = (n + 1) / 2;

  std::vector<std::size_t> rows;
  rows.reserve(m);
  std::vector<std::vector<double>> powers(half + 1, std::vector<double>(m * m));
  std::vector<double> traces(n + 1);
  std::vector<long double> series(n + 1);
  long double total = 0.0L;

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    rows.clear();
    for (std::size_t p = 0; p < n; ++p)
      if (mask & (std::uint64_t{1} << p)) {
        rows.push_back(2 * p);
        rows.push_back(2 * p + 1);
      }
    const std::size_t k = rows.size();
    // X A restricted to the chosen pairs: row r takes the partner row r ^ 1.
    std::vector<double>& base = powers[1];
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) base[r * k + c] = a(rows[r ^ 1], rows[c]);
    for (std::size_t j = 2; j <= half; ++j) multiply(powers[j - 1], base, powers[j], k);

    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t lhs = std::min(j, half);
      const std::size_t rhs = j - lhs;
      const std::vector<double>& p = powers[lhs];
      double tr = 0.0;
      if (rhs == 0) {
        for (std::size_t r = 0; r < k; ++r) tr += p[r * k + r];
      } else {
        const std::vector<double>& q = powers[rhs];
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c) tr += p[r * k + c] * q[c * k + r];
      }
      traces[j] = tr;
    }
    // Coefficient of x^n in exp(sum_j tr_j x^j / (2j)).
    series[0] = 1.0L;
    for (std::size_t d = 1; d <= n; ++d) {
      long double acc = 0.0L;
      for (std::size_t j = 1; j <= d; ++j) acc += 0.5L * traces[j] * series[d - j];
      series[d] = acc / static_cast<long double>(d);
    }
    const std::size_t chosen = k / 2;
    total += ((n - chosen) % 2 == 0) ? series[n] : -series[n];
  }
  return static_cast<double>(total);
}

double hafnian_dense(const SymmetricMatrix& a) {
  require_even(a.dimension(), "hafnian_dense");
  return a.dimension() <= 6 ? hafnian_reference(a) : hafnian_trace(a);
}

SymmetricMatrix expand_multiindex(const SymmetricMatrix& b, const MultiIndex& index) {
  if (index.size() != b.dimension()) throw std::invalid_argument("multi-index length does not match matrix dimension");
  std::vector<std::size_t> rows;
  rows.reserve(static_cast<std::size_t>(index.degree()));
  for (std::size_t k = 0; k < index.size(); ++k)
    for (int r = 0; r < index[k]; ++r) rows.push_back(k);
  SymmetricMatrix out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i; j < rows.size(); ++j) out.set(i, j, b(rows[i], rows[j]));
  return out;
}

double hafnian_repeated(const SymmetricMatrix& b, const MultiIndex& index) {
  if (index.size() != b.dimension()) throw std::invalid_argument("multi-index length does not match matrix dimension");
  require_even(static_cast<std::size_t>(index.degree()), "hafnian_repeated");
  const int s = index.degree() / 2;
  if (s == 0) return 1.0;

  std::vector<std::size_t> modes;
  std::vector<int> reps;
  for (std::size_t k = 0; k < index.size(); ++k)
    if (index[k] > 0) {
      modes.push_back(k);
      reps.push_back(index[k]);
    }
  const std::size_t q = modes.size();
  std::vector<long double> sub(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) sub[i * q + j] = b(modes[i], modes[j]);

  std::vector<std::vector<long double>> binom(q);
  for (std::size_t i = 0; i < q; ++i) {
    binom[i].resize(static_cast<std::size_t>(reps[i]) + 1);
    binom[i][0] = 1.0L;
    for (int v = 1; v <= reps[i]; ++v)
      binom[i][static_cast<std::size_t>(v)] = binom[i][static_cast<std::size_t>(v - 1)] * (reps[i] - v + 1) / v;
  }

  // Terms for v and I - v coincide (h -> -h, same parity since |I| is even),
  // so the first mode only runs over its lower half.
  std::vector<int> limit(reps);
  limit[0] = reps[0] / 2;
  std::vector<int> v(q, 0);
  std::vector<long double> h(q);
  long double total = 0.0L;
  for (;;) {
    int parity = 0;
    long double weight = (reps[0] % 2 == 0 && 2 * v[0] == reps[0]) ? 1.0L : 2.0L;
    for (std::size_t i = 0; i < q; ++i) {
      h[i] = 0.5L * reps[i] - v[i];
      parity += v[i];
      weight *= binom[i][static_cast<std::size_t>(v[i])];
    }
    long double form = 0.0L;
    for (std::size_t i = 0; i < q; ++i) {
      long double row = 0.0L;
      for (std::size_t j = 0; j < q; ++j) row += sub[i * q + j] * h[j];
      form += h[i] * row;
    }
    const long double term = weight * ipow(0.5L * form, s);
    total += (parity % 2 == 0) ? term : -term;

    std::size_t pos = 0;
    while (pos < q && v[pos] == limit[pos]) v[pos++] = 0;
    if (pos == q) break;
    ++v[pos];
  }
  long double fact = 1.0L;
  for (int f = 2; f <= s; ++f) fact *= f;
  return static_cast<double>(total / fact);
}

double hafnian_cost(const MultiIndex& index) {
  switch (choose_path(index)) {
    case Path::trivial:
      return 1.0;
    case Path::reference:
      return reference_cost(index.degree());
    case Path::trace:
      return trace_cost(index.degree());
    case Path::repeated:
      return repeated_cost(index);
  }
  return 0.0;
}

namespace {

double evaluate_multiindex(const SymmetricMatrix& b, const MultiIndex& index) {
  if (index.size() != b.dimension()) throw std::invalid_argument("multi-index length does not match matrix dimension");
  if (index.degree() % 2 != 0) throw std::invalid_argument("hafnian_multiindex: |I| must be even");
  switch (choose_path(index)) {
    case Path::trivial: {
      if (index.degree() == 0) return 1.0;
      std::size_t first = index.size(), second = index.size();
      for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] == 2) first = second = k;
        if (index[k] == 1) (first == index.size() ? first : second) = k;
      }
      return b(first, second);
    }
    case Path::reference:
      return hafnian_reference(expand_multiindex(b, index));
    case Path::trace:
      return hafnian_trace(expand_multiindex(b, index));
    case Path::repeated:
      return hafnian_repeated(b, index);
  }
  return 0.0;
}

}  // namespace

// ---- cache ---------------------------------------------------------------

std::size_t HafnianCache::KeyHash::operator()(const Key& key) const noexcept {
  return static_cast<std::size_t>(mix64(key.fingerprint ^ MultiIndexHash{}(key.index)));
}

std::optional<double> HafnianCache::find(std::uint64_t fingerprint, const MultiIndex& index) const {
  std::shared_lock lock(mutex_);
  const auto it = values_.find(Key{fingerprint, index});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void HafnianCache::insert(std::uint64_t fingerprint, const MultiIndex& index, double value) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = values_.emplace(Key{fingerprint, index}, value);
  if (inserted) pending_.push_back(it->first);
}

std::size_t HafnianCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

namespace {

constexpr char kCacheMagic[8] = {'G', 'B', 'S', 'P', 'E', 'H', 'C', '1'};

template <class T>
void put(std::string& buffer, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buffer.append(bytes, sizeof(T));
}

template <class T>
bool get(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

std::uint64_t checksum(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001B3ULL;
  return mix64(h);
}

}  // namespace

HafnianCache::LoadReport HafnianCache::load(const std::filesystem::path& path) {
  LoadReport report;
  if (!std::filesystem::exists(path)) return report;
  const std::uintmax_t file_size = std::filesystem::file_size(path);
  std::uintmax_t good_end = 0;
  {
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    if (in.read(magic, 8) && std::memcmp(magic, kCacheMagic, 8) == 0) {
      good_end = 8;
      std::unique_lock lock(mutex_);
      for (;;) {
        std::uint64_t fingerprint = 0;
        std::uint16_t length = 0;
        if (!get(in, fingerprint) || !get(in, length)) break;
        std::vector<std::uint16_t> raw(length);
        bool ok = true;
        for (auto& e : raw) ok = ok && get(in, e);
        double value = 0.0;
        std::uint64_t stored = 0;
        if (!ok || !get(in, value) || !get(in, stored)) break;
        std::string record;
        put(record, fingerprint);
        put(record, length);
        for (auto e : raw) put(record, e);
        put(record, value);
        if (checksum(record) != stored) break;
        std::vector<int> entries(raw.begin(), raw.end());
        values_.emplace(Key{fingerprint, MultiIndex(std::move(entries))}, value);
        ++report.records;
        good_end += record.size() + sizeof(stored);
      }
      pending_.clear();
    }
  }
  if (good_end < file_size) {
    report.truncated_bytes = file_size - good_end;
    std::filesystem::resize_file(path, good_end);
  }
  return report;
}

std::size_t HafnianCache::append_new_entries(const std::filesystem::path& path) {
  std::unique_lock lock(mutex_);
  std::string buffer;
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (fresh) buffer.append(kCacheMagic, 8);
  for (const Key& key : pending_) {
    std::string record;
    put(record, key.fingerprint);
    put(record, static_cast<std::uint16_t>(key.index.size()));
    for (int e : key.index.entries()) put(record, static_cast<std::uint16_t>(e));
    put(record, values_.at(key));
    buffer += record;
    put(buffer, checksum(record));
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot open cache file " + path.string());
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  const std::size_t written = pending_.size();
  pending_.clear();
  return written;
}

// ---- multi-index entry points -------------------------------------------

double hafnian_multiindex(const SymmetricMatrix& b, const MultiIndex& index, HafnianCache& cache) {
  const std::uint64_t fingerprint = b.fingerprint();
  if (auto hit = cache.find(fingerprint, index)) return *hit;
  const double value = evaluate_multiindex(b, index);
  cache.insert(fingerprint, index, value);
  return value;
}

double hafnian_multiindex(const SymmetricMatrix& b, const MultiIndex& index) { return evaluate_multiindex(b, index); }

int sign_of(double hafnian_value) {
  if (std::abs(hafnian_value) <= kHafnianZeroTolerance) return 0;
  return hafnian_value > 0.0 ? 1 : -1;
}

int hafnian_sign(const SymmetricMatrix& b, const MultiIndex& index, HafnianCache& cache) {
  return sign_of(hafnian_multiindex(b, index, cache));
}

DegreeHafnians batch_hafnians_degree(const SymmetricMatrix& b, double t, int half_degree, HafnianCache& cache) {
  if (half_degree < 0) throw std::invalid_argument("batch_hafnians_degree: K must be nonnegative");
  DegreeHafnians out;
  out.patterns = degree_patterns(b.dimension(), 2 * half_degree);
  const double scale = std::pow(t, half_degree);
  out.values.reserve(out.patterns->size());
  for (const MultiIndex& index : *out.patterns) out.values.push_back(scale * hafnian_multiindex(b, index, cache));
  return out;
}

}  // namespace gbspe
