#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mdelta {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed for task `task_id` under `root`: root xor a hash of the task id.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t task_id) {
  return root ^ splitmix64(task_id);
}
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view task) {
  return root ^ splitmix64(fnv1a64(task));
}

// Deterministic PRNG. Unlike the std distributions, the conversions below are
// fully specified, so streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdelta
