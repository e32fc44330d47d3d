// Seeding and sampling helpers shared by the simulator and the agents.
//
// All randomness flows from one master seed through named streams so that
// channel noise, weight init, exploration and replay sampling can be varied
// independently. Distribution sampling is hand-rolled on top of mt19937_64
// to keep artifacts bit-reproducible across standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tdsim {

enum class RngStream : std::uint64_t {
  Channel = 1,
  AgentInit = 2,
  Exploration = 3,
  Sampler = 4,
  Meta = 5,
};

// Derives an independent engine for (master seed, stream, index) using
// splitmix64 over a counter; avoids correlated mt19937 states from nearby
// integer seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master_seed, RngStream stream,
                                std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ (static_cast<std::uint64_t>(stream) << 32));
  s = splitmix64(s ^ index);
  return std::mt19937_64{s};
}

// Uniform in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline int uniform_int(std::mt19937_64& rng, int n) {
  return static_cast<int>(uniform01(rng) * n) % n;
}

// Standard normal via Box-Muller (no cached second value).
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double normal(std::mt19937_64& rng, double mean, double stddev) {
  return mean + stddev * standard_normal(rng);
}

}  // namespace tdsim
