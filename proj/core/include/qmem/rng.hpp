#pragma once

#include <cstdint>
#include <random>

namespace qmem {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream tags keep the signal draws and the shot noise of one run on
// independent sequences.
enum class StreamTag : std::uint64_t {
  Signal = 1,
  Readout = 2,
  Synthetic = 3,
};

// Counter-based split: the seed of a stream depends only on
// (master, run, tag), never on scheduling.
inline constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t run,
                                           StreamTag tag) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (run * 0xd1342543de82ef95ULL));
  return splitmix64(s ^ static_cast<std::uint64_t>(tag));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t run, StreamTag tag) {
  return Rng(stream_seed(master, run, tag));
}

}  // namespace qmem
