#pragma once

#include <cstdint>

namespace cbb {

// Purpose tags split one seed into independent substreams, so the nature
// draws (contexts, rewards) can be replayed against different policies
// while each policy keeps its own coin stream.
enum class Purpose : std::uint64_t {
  Context = 1,
  Reward = 2,
  PolicyFi = 3,
  PolicyUcb = 4,
  PolicyGreedy = 5,
  Generic = 6,
};

namespace detail {
// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Counter-based uniform stream: every draw is a pure function of
// (seed, purpose, t, n). No state, no ordering constraints, cheap to
// fork across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(Purpose purpose, std::int64_t t, std::uint64_t n = 0) const {
    using detail::mix64;
    std::uint64_t h = mix64(seed_ ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(purpose) * 0xbb67ae8584caa73bULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(t) * 0x3c6ef372fe94f82bULL));
    h = mix64(h ^ (n * 0xa54ff53a5f1d36f1ULL));
    return h;
  }

  // Uniform double in [0, 1).
  double uniform(Purpose purpose, std::int64_t t, std::uint64_t n = 0) const {
    return static_cast<double>(bits(purpose, t, n) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

  // Stable per-run seed derivation, e.g. derive(base_seed, run_index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    return detail::mix64(detail::mix64(seed) ^ (salt * 0x510e527fade682d1ULL));
  }

 private:
  std::uint64_t seed_;
};

}  // namespace cbb
