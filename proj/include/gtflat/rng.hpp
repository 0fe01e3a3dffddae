#pragma once

#include <cstdint>
#include <random>

namespace gtflat::rng {

// Purpose tags for derived streams. Every random decision in the engine pulls
// from a stream keyed by (root seed, tag, a, b) so that adding new consumers
// never perturbs existing ones and every run is reproducible from one seed.
inline constexpr std::uint64_t kGlobalInit = 1;  // initial global model
inline constexpr std::uint64_t kSelect = 2;      // active-user selection (a = round)
inline constexpr std::uint64_t kClient = 3;      // local training (a = round, b = client id)
inline constexpr std::uint64_t kData = 4;        // synthetic training data
inline constexpr std::uint64_t kTestData = 5;    // synthetic held-out data
inline constexpr std::uint64_t kPartition = 6;   // client partitioning

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed as a pure function of (root, tag, a, b).
inline std::uint64_t derive(std::uint64_t root, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(root);
  s = splitmix64(s ^ tag);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return s;
}

inline std::mt19937_64 stream(std::uint64_t root, std::uint64_t tag,
                              std::uint64_t a = 0, std::uint64_t b = 0) {
  return std::mt19937_64(derive(root, tag, a, b));
}

}  // namespace gtflat::rng
