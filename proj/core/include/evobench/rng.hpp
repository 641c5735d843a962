#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace evobench {

/// Deterministic random source. Everything that samples takes one of these so
/// results are pure functions of (inputs, seed). mt19937_64 has a
/// standard-mandated sequence, and all bounded draws below avoid
/// std::uniform_int_distribution (whose mapping is implementation-defined),
/// so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return gen_(); }

  /// Uniform draw in [0, n). n == 0 returns 0.
  std::uint64_t uniform(std::uint64_t n) {
    if (n == 0) return 0;
    // Modulo bias over a 64-bit stream is < 2^-32 for any n we ever use.
    return next() % n;
  }

  /// Uniform draw in [lo, hi], inclusive.
  int range(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(uniform(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(v.size()))];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(i))]);
    }
  }

  /// Independent child stream keyed by label. Forking does not advance this
  /// stream, so sibling forks are order-independent.
  Rng fork(const std::string& label) const {
    return Rng(mix(seed_, hash_label(label)));
  }

  Rng fork(const std::string& label, std::uint64_t index) const {
    return Rng(mix(mix(seed_, hash_label(label)), index + 0x9e3779b97f4a7c15ull));
  }

  static std::uint64_t hash_label(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    // splitmix64 finalizer
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace evobench
