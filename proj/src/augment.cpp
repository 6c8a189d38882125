#include "salfuse/augment.hpp"

#include <algorithm>
#include <cmath>

#include "salfuse/seeding.hpp"

namespace salfuse::augment {

namespace {

// Bilinear sample at (y, x). Outside samples read as zero when `zero_fill`,
// otherwise the coordinate clamps to the border.
float sample(const RasterImage& img, double y, double x, int ch, bool zero_fill) {
  const int h = img.height();
  const int w = img.width();
  if (!zero_fill) {
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  }
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const double fy = y - y0;
  const double fx = x - x0;
  const auto px = [&](int r, int c) -> double {
    if (r < 0 || c < 0 || r >= h || c >= w) return 0.0;
    return img.at(r, c, ch);
  };
  const double top = px(y0, x0) * (1.0 - fx) + px(y0, x0 + 1) * fx;
  const double bot = px(y0 + 1, x0) * (1.0 - fx) + px(y0 + 1, x0 + 1) * fx;
  return static_cast<float>(std::clamp(top * (1.0 - fy) + bot * fy, 0.0, 1.0));
}

RasterImage reflect(const RasterImage& img, bool horizontal, bool vertical) {
  if (!horizontal && !vertical) return img;
  RasterImage out(img.height(), img.width(), img.channels());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      const int sr = vertical ? img.height() - 1 - r : r;
      const int sc = horizontal ? img.width() - 1 - c : c;
      for (int k = 0; k < img.channels(); ++k) out.at(r, c, k) = img.at(sr, sc, k);
    }
  return out;
}

RasterImage rotate(const RasterImage& img, double angle_deg) {
  if (angle_deg == 0.0) return img;
  const double theta = angle_deg * M_PI / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cy = (img.height() - 1) / 2.0;
  const double cx = (img.width() - 1) / 2.0;
  RasterImage out(img.height(), img.width(), img.channels());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      // Inverse rotation maps each output pixel back into the source.
      const double dy = r - cy;
      const double dx = c - cx;
      const double sx = cs * dx + sn * dy + cx;
      const double sy = -sn * dx + cs * dy + cy;
      for (int k = 0; k < img.channels(); ++k) out.at(r, c, k) = sample(img, sy, sx, k, true);
    }
  return out;
}

RasterImage scale(const RasterImage& img, double sx, double sy) {
  if (sx == 1.0 && sy == 1.0) return img;
  const double h = img.height();
  const double w = img.width();
  RasterImage out(img.height(), img.width(), img.channels());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      const double src_y = (r + 0.5 - h / 2.0) / sy + h / 2.0 - 0.5;
      const double src_x = (c + 0.5 - w / 2.0) / sx + w / 2.0 - 0.5;
      for (int k = 0; k < img.channels(); ++k) out.at(r, c, k) = sample(img, src_y, src_x, k, false);
    }
  return out;
}

RasterImage translate(const RasterImage& img, int dx, int dy) {
  if (dx == 0 && dy == 0) return img;
  RasterImage out(img.height(), img.width(), img.channels(), 0.0f);
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      const int sr = r - dy;
      const int sc = c - dx;
      if (sr < 0 || sc < 0 || sr >= img.height() || sc >= img.width()) continue;
      for (int k = 0; k < img.channels(); ++k) out.at(r, c, k) = img.at(sr, sc, k);
    }
  return out;
}

}  // namespace

bool AugmentSpec::in_range() const {
  return angle_deg >= -kMaxAngleDeg && angle_deg <= kMaxAngleDeg && shift_x >= 0 &&
         shift_x <= kMaxShift && shift_y >= 0 && shift_y <= kMaxShift && scale_x >= 1.0 &&
         scale_x <= kMaxScale && scale_y >= 1.0 && scale_y <= kMaxScale;
}

AugmentSpec sample_spec(std::uint64_t seed) {
  Rng rng(seed);
  AugmentSpec spec;
  spec.reflect_h = rng.coin();
  spec.reflect_v = rng.coin();
  spec.angle_deg = rng.uniform(-kMaxAngleDeg, kMaxAngleDeg);
  spec.shift_x = static_cast<int>(rng.uniform_int(0, kMaxShift));
  spec.shift_y = static_cast<int>(rng.uniform_int(0, kMaxShift));
  spec.scale_x = rng.uniform(1.0, kMaxScale);
  spec.scale_y = rng.uniform(1.0, kMaxScale);
  return spec;
}

RasterImage apply(const RasterImage& img, const AugmentSpec& spec) {
  if (img.empty()) return img;
  RasterImage out = reflect(img, spec.reflect_h, spec.reflect_v);
  out = rotate(out, spec.angle_deg);
  out = scale(out, spec.scale_x, spec.scale_y);
  return translate(out, spec.shift_x, spec.shift_y);
}

}  // namespace salfuse::augment
