#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cogspeech {

// All randomness in the pipeline flows from one config seed through named
// streams, so adding a model or fold never shifts another stream.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 named_stream(uint64_t seed, std::string_view name) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a64(name)));
}

}  // namespace cogspeech
