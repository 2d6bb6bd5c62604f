#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sbandit {

// Uniform randomness behind a small interface so tests can substitute a
// counting stub and so every caller draws through the same primitives.
//
// Draw discipline: choose() consumes exactly one draw, also for m == 1.
// Policies rely on this to keep their streams aligned across coupled runs
// that differ only in arm replication.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // uniform double in [0, 1), 53-bit resolution
  virtual double u01() = 0;

  // uniform index in [0, m)
  virtual std::size_t choose(std::size_t m) {
    double u = u01();
    if (m <= 1) return 0;
    auto j = static_cast<std::size_t>(u * static_cast<double>(m));
    return j >= m ? m - 1 : j;
  }

  bool bernoulli(double p) { return u01() < p; }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable, documented seed derivation used everywhere in the harness:
//   derive(base, rep, tag) = splitmix64(splitmix64(base ^ fnv1a64(tag)) ^ rep)
// Distinct (rep, tag) pairs produce independent streams; the scheme is part
// of the results format and must not change between releases.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t rep_index,
                                    std::string_view tag) {
  return splitmix64(splitmix64(base_seed ^ fnv1a64(tag)) ^ rep_index);
}

class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double u01() override {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// First k entries of a Fisher-Yates shuffle of [0, n); ascending ids of the
// sampled subset are returned so downstream iteration order is canonical.
std::vector<std::int32_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                     RandomSource& rng);

}  // namespace sbandit
