#pragma once

#include <cstdint>
#include <random>

namespace hqkd {

// Named consumers of randomness. Each gets an independent stream derived
// from the master seed, so results do not depend on evaluation order.
enum class StreamId : std::uint64_t {
  protocol_step = 1,
  test_selection = 2,
  analyzer_check = 3,
  property_tests = 4,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seeded random stream. Draws are built from raw 64-bit engine output only,
// so sequences are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream `index` of consumer `stream` under `master`:
  //   seed = splitmix64(splitmix64(master ^ splitmix64(stream)) + index)
  static Rng derive(std::uint64_t master, StreamId stream, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace hqkd
