#include "salfuse/mask_roi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "salfuse/error.hpp"

namespace salfuse {

namespace {

void check_same_dims(const RasterImage& img, const BinaryMask& mask) {
  if (img.height() != mask.height() || img.width() != mask.width()) {
    throw InvalidInput("mask is " + std::to_string(mask.height()) + "x" +
                       std::to_string(mask.width()) + " but image is " +
                       std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
}

// Nearest-rank quantile.
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

bool covers(const BinaryMask& mask, double min_coverage) {
  return mask.count() > 0 && mask.area_fraction() >= min_coverage;
}

}  // namespace

BinaryMask::BinaryMask(int height, int width, bool fill)
    : height_(height), width_(width),
      bits_(static_cast<std::size_t>(height) * width, fill ? 1 : 0) {
  if (height < 0 || width < 0) throw InvalidInput("negative mask dimensions");
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

double BinaryMask::area_fraction() const {
  return bits_.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(bits_.size());
}

void RoiParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("roi.alpha must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("roi.rho must be in (0,1)");
  if (!(min_coverage >= 0.0 && min_coverage < 1.0))
    throw ConfigError("roi.min_coverage must be in [0,1)");
}

BinaryMask binarize(const GrayMap& saliency, const RoiParams& params) {
  params.validate();
  BinaryMask mask(saliency.height(), saliency.width());
  if (saliency.empty()) return mask;

  const double threshold = params.alpha * saliency.mean();
  for (std::size_t i = 0; i < saliency.size(); ++i) mask.set(i, saliency[i] > threshold);
  if (covers(mask, params.min_coverage)) return mask;

  const double q = quantile(saliency.data(), 0.95);
  const double floor = saliency.min();
  for (std::size_t i = 0; i < saliency.size(); ++i)
    mask.set(i, saliency[i] >= q && saliency[i] > floor);
  if (covers(mask, params.min_coverage)) return mask;

  return BinaryMask(saliency.height(), saliency.width(), true);
}

RasterImage foreground(const RasterImage& img, const BinaryMask& mask) {
  check_same_dims(img, mask);
  RasterImage out = img;
  const int ch = img.channels();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (mask[p]) continue;
    for (int k = 0; k < ch; ++k) out.data()[p * ch + k] = 0.0f;
  }
  return out;
}

BoundingBox mask_bounds(const BinaryMask& mask, double rho) {
  const int h = mask.height();
  const int w = mask.width();
  BoundingBox box = BoundingBox::full(h, w);
  if (h == 0 || w == 0) return box;

  std::vector<std::size_t> row_count(h, 0), col_count(w, 0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (mask.at(r, c)) {
        ++row_count[r];
        ++col_count[c];
      }

  const auto span = [rho](const std::vector<std::size_t>& counts, double length, int& start,
                          int& end) {
    int first = -1, last = -1;
    for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
      if (static_cast<double>(counts[i]) / length >= rho) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first >= 0) {
      start = first;
      end = last + 1;
    }
  };
  span(row_count, w, box.row_start, box.row_end);
  span(col_count, h, box.col_start, box.col_end);
  return box;
}

BinaryMask crop(const BinaryMask& mask, const BoundingBox& box) {
  if (box.row_start < 0 || box.col_start < 0 || box.row_end > mask.height() ||
      box.col_end > mask.width() || box.height() <= 0 || box.width() <= 0) {
    throw InvalidInput("crop box outside mask bounds");
  }
  BinaryMask out(box.height(), box.width());
  for (int r = 0; r < box.height(); ++r)
    for (int c = 0; c < box.width(); ++c)
      out.set(r, c, mask.at(box.row_start + r, box.col_start + c));
  return out;
}

RasterImage fg_roi(const RasterImage& img, const BinaryMask& mask, const RoiParams& params) {
  check_same_dims(img, mask);
  return crop(img, mask_bounds(mask, params.rho));
}

RasterImage roi(const RasterImage& img, const BinaryMask& mask, const RoiParams& params) {
  check_same_dims(img, mask);
  return crop(foreground(img, mask), mask_bounds(mask, params.rho));
}

RasterImage mask_to_image(const BinaryMask& mask) {
  RasterImage out(mask.height(), mask.width(), 1);
  for (std::size_t i = 0; i < mask.size(); ++i) out.data()[i] = mask[i] ? 1.0f : 0.0f;
  return out;
}

}  // namespace salfuse
