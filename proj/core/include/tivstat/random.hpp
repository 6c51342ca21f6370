#pragma once

#include <cstdint>
#include <random>

namespace tivstat {

// SplitMix64 finalizer; used to derive well-separated seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A seeded random stream. Streams for independent units of work are obtained
// with `substream`, which depends only on (master seed, index), so results do
// not depend on the order in which work is scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(splitmix64(master_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  double normal(double stddev = 1.0) { return stddev * normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tivstat
