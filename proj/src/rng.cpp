#include "gbspe/rng.hpp"

namespace gbspe {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSeedSalt = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kDeriveSalt = 0x632BE59BD9B4E019ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  // SplitMix64 finalizer.
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed ^ kSeedSalt);
  for (std::uint64_t tag : tags) h = mix64(h ^ mix64(tag + kDeriveSalt));
  return h;
}

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed ^ kSeedSalt)) {}

RngStream::result_type RngStream::operator()() {
  return mix64(key_ + kGolden * (++counter_));
}

RngStream RngStream::derive(std::uint64_t index) const {
  return RngStream(FromKey{}, mix64(key_ ^ mix64(index + kDeriveSalt)));
}

double RngStream::uniform01() {
  // 53 random bits, offset by half an ulp so neither endpoint is reachable.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

}  // namespace gbspe
