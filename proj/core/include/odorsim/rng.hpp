#pragma once

#include <cstdint>
#include <random>

namespace odorsim {

/// Seeded random stream. Each consumer (plume, planner, disturbance) owns
/// its own stream derived from the run seed so that adding draws in one
/// layer never perturbs another.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer over (seed, stream id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t { Plume = 1, Planner = 2, Disturbance = 3 };

inline RandomStream make_stream(std::uint64_t seed, Stream which) {
  return RandomStream(derive_seed(seed, static_cast<std::uint64_t>(which)));
}

}  // namespace odorsim
