#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace salfuse {

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t stable_hash(std::string_view text);

// Seed for a named sub-stream of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view discriminator);

// Portable draws on top of mt19937_64. The standard distributions are
// implementation-defined, so these are spelled out to keep outputs
// bitwise-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on the closed integer range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace salfuse
