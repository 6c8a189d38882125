#pragma once

#include <cstdint>

#include "salfuse/imaging.hpp"

namespace salfuse::augment {

// Ranges: angle in [-10, 10] degrees, shifts in {0..5} pixels, scales in [1, 2].
struct AugmentSpec {
  bool reflect_h = false;  // mirror columns
  bool reflect_v = false;  // mirror rows
  double angle_deg = 0.0;
  int shift_x = 0;
  int shift_y = 0;
  double scale_x = 1.0;
  double scale_y = 1.0;

  static AugmentSpec identity() { return {}; }
  bool in_range() const;

  friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

inline constexpr double kMaxAngleDeg = 10.0;
inline constexpr int kMaxShift = 5;
inline constexpr double kMaxScale = 2.0;

AugmentSpec sample_spec(std::uint64_t seed);

/// Reflect, rotate about the center (bilinear, black fill), upscale about
/// the center and crop back to size, then translate (black fill). Output
/// dimensions always equal the input's.
RasterImage apply(const RasterImage& img, const AugmentSpec& spec);

}  // namespace salfuse::augment
