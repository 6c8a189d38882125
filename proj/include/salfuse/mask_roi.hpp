#pragma once

#include <cstdint>
#include <vector>

#include "salfuse/imaging.hpp"

namespace salfuse {

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool fill = false);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const { return bits_[static_cast<std::size_t>(row) * width_ + col] != 0; }
  void set(int row, int col, bool v) { bits_[static_cast<std::size_t>(row) * width_ + col] = v ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  std::size_t count() const;
  double area_fraction() const;
  bool all() const { return count() == size(); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct RoiParams {
  double alpha = 1.5;          // threshold = alpha * mean(saliency)
  double rho = 0.02;           // min fraction of set bits to keep a row/col
  double min_coverage = 0.01;  // below this area the fallback rule applies

  void validate() const;
};

/// Threshold at alpha * mean. When that covers less than min_coverage of
/// the image, retry with the 0.95 quantile (restricted to values above the
/// map minimum); when that also falls short, return an all-ones mask.
BinaryMask binarize(const GrayMap& saliency, const RoiParams& params);

// Zeroes every channel where the mask is 0.
RasterImage foreground(const RasterImage& img, const BinaryMask& mask);

BoundingBox mask_bounds(const BinaryMask& mask, double rho);

BinaryMask crop(const BinaryMask& mask, const BoundingBox& box);

// Original image cropped to the mask's support.
RasterImage fg_roi(const RasterImage& img, const BinaryMask& mask, const RoiParams& params);

// Foreground image cropped to the mask's support.
RasterImage roi(const RasterImage& img, const BinaryMask& mask, const RoiParams& params);

RasterImage mask_to_image(const BinaryMask& mask);

}  // namespace salfuse
