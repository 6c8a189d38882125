#include "salfuse/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "salfuse/error.hpp"

namespace salfuse {

namespace {

void check_dims(int height, int width) {
  if (height < 0 || width < 0) {
    throw InvalidInput("negative image dimensions " + std::to_string(height) + "x" +
                       std::to_string(width));
  }
}

// Bilinear sample position for output index `dst` when mapping `in` samples
// onto `out` samples by pixel centers. Returns the lower index and weight.
struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> make_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (int d = 0; d < out; ++d) {
    double src = in == out ? static_cast<double>(d) : (d + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, in - 1);
    taps[d] = {lo, hi, src - lo};
  }
  return taps;
}

}  // namespace

RasterImage::RasterImage(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width);
  if (channels < 1) throw InvalidInput("image channel count must be positive");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

RasterImage::RasterImage(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width);
  if (channels < 1) throw InvalidInput("image channel count must be positive");
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw InvalidInput("image data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height) + "x" +
                       std::to_string(width) + "x" + std::to_string(channels));
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw InvalidInput("image value outside [0,1]");
  }
}

GrayMap::GrayMap(int height, int width, double fill) : height_(height), width_(width) {
  check_dims(height, width);
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

GrayMap::GrayMap(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_dims(height, width);
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw InvalidInput("map data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height) + "x" +
                       std::to_string(width));
  }
}

double GrayMap::min() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double GrayMap::max() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double GrayMap::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) /
         static_cast<double>(data_.size());
}

GrayMap rgb_to_luminance(const RasterImage& img) {
  GrayMap out(img.height(), img.width());
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.data()[i];
    return out;
  }
  if (img.channels() != 3) {
    throw InvalidInput("rgb_to_luminance expects 1 or 3 channels, got " +
                       std::to_string(img.channels()));
  }
  const auto& d = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = d[3 * i];
    const double g = d[3 * i + 1];
    const double b = d[3 * i + 2];
    if (r == g && g == b) {
      out[i] = r;
    } else {
      out[i] = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    }
  }
  return out;
}

GrayMap resize_bilinear(const GrayMap& map, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw InvalidInput("resize target must be at least 1x1, got " + std::to_string(out_h) +
                       "x" + std::to_string(out_w));
  }
  if (map.empty()) throw InvalidInput("cannot resize an empty map");
  if (out_h == map.height() && out_w == map.width()) return map;

  const auto rows = make_taps(map.height(), out_h);
  const auto cols = make_taps(map.width(), out_w);
  GrayMap out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const Tap& tr = rows[r];
    for (int c = 0; c < out_w; ++c) {
      const Tap& tc = cols[c];
      const double top =
          map.at(tr.lo, tc.lo) + tc.frac * (map.at(tr.lo, tc.hi) - map.at(tr.lo, tc.lo));
      const double bot =
          map.at(tr.hi, tc.lo) + tc.frac * (map.at(tr.hi, tc.hi) - map.at(tr.hi, tc.lo));
      double v = top + tr.frac * (bot - top);
      // Convex combination; clamp away rounding excursions.
      const double lo = std::min({map.at(tr.lo, tc.lo), map.at(tr.lo, tc.hi),
                                  map.at(tr.hi, tc.lo), map.at(tr.hi, tc.hi)});
      const double hi = std::max({map.at(tr.lo, tc.lo), map.at(tr.lo, tc.hi),
                                  map.at(tr.hi, tc.lo), map.at(tr.hi, tc.hi)});
      out.at(r, c) = std::clamp(v, lo, hi);
    }
  }
  return out;
}

GrayMap normalize_map(const GrayMap& map) {
  for (double v : map.data()) {
    if (!std::isfinite(v)) throw InvalidInput("normalize_map: non-finite value in map");
  }
  GrayMap out(map.height(), map.width(), 0.0);
  if (map.empty()) return out;
  const double lo = map.min();
  const double hi = map.max();
  if (hi == lo) return out;
  const double span = hi - lo;
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = map[i] == hi ? 1.0 : (map[i] - lo) / span;
  }
  return out;
}

std::pair<int, int> fit_within(int height, int width, int max_side) {
  if (max_side < 1) throw InvalidInput("max side must be positive");
  const int longest = std::max(height, width);
  if (longest <= max_side) return {height, width};
  const double s = static_cast<double>(max_side) / longest;
  const int h = std::max(1, static_cast<int>(std::lround(height * s)));
  const int w = std::max(1, static_cast<int>(std::lround(width * s)));
  return {std::min(h, max_side), std::min(w, max_side)};
}

GrayMap crop(const GrayMap& map, const BoundingBox& box) {
  if (box.row_start < 0 || box.col_start < 0 || box.row_end > map.height() ||
      box.col_end > map.width() || box.height() <= 0 || box.width() <= 0) {
    throw InvalidInput("crop box outside map bounds");
  }
  GrayMap out(box.height(), box.width());
  for (int r = 0; r < box.height(); ++r)
    for (int c = 0; c < box.width(); ++c) out.at(r, c) = map.at(box.row_start + r, box.col_start + c);
  return out;
}

RasterImage crop(const RasterImage& img, const BoundingBox& box) {
  if (box.row_start < 0 || box.col_start < 0 || box.row_end > img.height() ||
      box.col_end > img.width() || box.height() <= 0 || box.width() <= 0) {
    throw InvalidInput("crop box outside image bounds");
  }
  RasterImage out(box.height(), box.width(), img.channels());
  for (int r = 0; r < box.height(); ++r)
    for (int c = 0; c < box.width(); ++c)
      for (int k = 0; k < img.channels(); ++k)
        out.at(r, c, k) = img.at(box.row_start + r, box.col_start + c, k);
  return out;
}

RasterImage to_raster(const GrayMap& map) {
  RasterImage out(map.height(), map.width(), 1);
  for (std::size_t i = 0; i < map.size(); ++i)
    out.data()[i] = static_cast<float>(std::clamp(map[i], 0.0, 1.0));
  return out;
}

RasterImage resize_image(const RasterImage& img, int out_h, int out_w) {
  if (out_h == img.height() && out_w == img.width()) return img;
  RasterImage out(out_h, out_w, img.channels());
  for (int k = 0; k < img.channels(); ++k) {
    GrayMap plane(img.height(), img.width());
    for (std::size_t i = 0; i < plane.size(); ++i)
      plane[i] = img.data()[i * img.channels() + k];
    const GrayMap resized = resize_bilinear(plane, out_h, out_w);
    for (std::size_t i = 0; i < resized.size(); ++i)
      out.data()[i * img.channels() + k] =
          static_cast<float>(std::clamp(resized[i], 0.0, 1.0));
  }
  return out;
}

}  // namespace salfuse
