#pragma once

#include <cstddef>
#include <vector>

namespace salfuse {

// Row-major raster with interleaved channels, values in [0,1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int height, int width, int channels, float fill = 0.0f);
  RasterImage(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  bool empty() const { return data_.empty(); }

  float& at(int row, int col, int ch = 0) {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  float at(int row, int col, int ch = 0) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Single-channel floating map: feature maps, saliency maps, spectra.
class GrayMap {
 public:
  GrayMap() = default;
  GrayMap(int height, int width, double fill = 0.0);
  GrayMap(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double min() const;
  double max() const;
  double mean() const;

  friend bool operator==(const GrayMap&, const GrayMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Half-open crop window [row_start, row_end) x [col_start, col_end).
struct BoundingBox {
  int row_start = 0;
  int row_end = 0;
  int col_start = 0;
  int col_end = 0;

  int height() const { return row_end - row_start; }
  int width() const { return col_end - col_start; }
  bool contains(int row, int col) const {
    return row >= row_start && row < row_end && col >= col_start && col < col_end;
  }

  static BoundingBox full(int height, int width) { return {0, height, 0, width}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Rec. 709 luminance for 3-channel images, identity copy for 1-channel.
/// Throws InvalidInput for any other channel count.
GrayMap rgb_to_luminance(const RasterImage& img);

/// Bilinear resampling on pixel centers with clamp-to-edge borders. The
/// output never leaves [min(map), max(map)].
GrayMap resize_bilinear(const GrayMap& map, int out_h, int out_w);

/// Affine rescale to [0,1]; constant maps become all zeros.
GrayMap normalize_map(const GrayMap& map);

/// Largest dimensions (h', w') with max(h', w') == max_side that keep the
/// aspect ratio, or the input dimensions when they already fit.
std::pair<int, int> fit_within(int height, int width, int max_side);

GrayMap crop(const GrayMap& map, const BoundingBox& box);
RasterImage crop(const RasterImage& img, const BoundingBox& box);

// Lift a map to a single-channel raster, clamping into [0,1].
RasterImage to_raster(const GrayMap& map);

// Resize every channel of an image bilinearly.
RasterImage resize_image(const RasterImage& img, int out_h, int out_w);

}  // namespace salfuse
