#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "ecodec/errors.hpp"

namespace ecodec {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// Counter-based random stream. The whole state is (key, counter), so a
/// stream can be persisted and resumed exactly, and sub-streams can be derived
/// by name without consuming draws from the parent.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static RngStream from_seed(std::uint64_t seed, std::string_view name) {
    return RngStream(detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(name))));
  }

  /// Independent child stream; the parent's position is unchanged.
  RngStream derive(std::string_view name) const {
    return RngStream(detail::splitmix64(key_ ^ detail::fnv1a(name)) ^ 0xA5A5A5A55A5A5A5AULL);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t x = key_ + 0x9E3779B97F4A7C15ULL * (++counter_);
    return detail::splitmix64(detail::splitmix64(x) ^ key_);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("RngStream::below: empty range");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw ArgumentError("RngStream::between: hi < lo");
    return lo + below(hi - lo + 1);
  }

  bool bernoulli(double p) noexcept {
    if (p <= 0.0) {
      next_u64();
      return false;
    }
    return uniform() < p;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  bool operator==(const RngStream&) const = default;

 private:
  std::uint64_t key_{0};
  std::uint64_t counter_{0};
};

/// Named streams under one master seed. Streams are created lazily and their
/// positions are what a snapshot records.
class RngSource {
 public:
  RngSource() = default;
  explicit RngSource(std::uint64_t seed) : seed_(seed) {}

  RngStream& stream(const std::string& name) {
    auto it = streams_.find(name);
    if (it == streams_.end()) {
      it = streams_.emplace(name, RngStream::from_seed(seed_, name)).first;
    }
    return it->second;
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Stream positions by name, for persistence.
  std::map<std::string, std::uint64_t> positions() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [name, s] : streams_) out.emplace(name, s.counter());
    return out;
  }

  static RngSource restore(std::uint64_t seed,
                           const std::map<std::string, std::uint64_t>& positions) {
    RngSource src(seed);
    for (const auto& [name, counter] : positions) {
      src.streams_.emplace(name, RngStream(RngStream::from_seed(seed, name).key(), counter));
    }
    return src;
  }

  bool operator==(const RngSource&) const = default;

 private:
  std::uint64_t seed_{0};
  std::map<std::string, RngStream> streams_;
};

}  // namespace ecodec
