#include "hqkd/rng.hpp"

#include "hqkd/errors.hpp"

namespace hqkd {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t master, StreamId stream, std::uint64_t index) {
  const auto id = static_cast<std::uint64_t>(stream);
  return Rng(splitmix64(splitmix64(master ^ splitmix64(id)) + index));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
  // Largest multiple of bound representable; draws above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

}  // namespace hqkd
