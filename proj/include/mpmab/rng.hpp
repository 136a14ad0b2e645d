#pragma once

#include <cstdint>
#include <random>

namespace mpmab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for run `index` of a batch. Depends only on (master, index), so
/// growing a batch never changes the earlier runs.
inline std::uint64_t run_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// Independent substream of a run. Stream ids in use: 0 instance sampling,
/// 1 environment rewards, 2 attacker team coordination, 16 + p player p.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  return Rng(seq);
}

namespace stream {
inline constexpr std::uint64_t kInstance = 0;
inline constexpr std::uint64_t kEnvironment = 1;
inline constexpr std::uint64_t kAttackTeam = 2;
inline constexpr std::uint64_t player(std::uint64_t p) { return 16 + p; }
}  // namespace stream

inline int uniform_arm(Rng& rng, int K) { return std::uniform_int_distribution<int>(1, K)(rng); }

}  // namespace mpmab
