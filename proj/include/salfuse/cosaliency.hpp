#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "salfuse/imaging.hpp"

namespace salfuse::cos {

using Lab = std::array<double, 3>;

struct ImageDims {
  int height = 0;
  int width = 0;
};

// One entry per pixel over all images, in image-major row-major order.
struct PixelFeatureSet {
  std::vector<Lab> color;            // L/100, (a+128)/255, (b+128)/255
  std::vector<std::array<double, 2>> position;  // ((col+0.5)/w, (row+0.5)/h)
  std::vector<int> image;            // owning image index
  std::vector<ImageDims> dims;       // per image

  std::size_t size() const { return color.size(); }
  int image_count() const { return static_cast<int>(dims.size()); }
};

struct ClusterModel {
  int k = 0;
  std::vector<Lab> centroids;
  std::vector<int> assignment;
  std::vector<std::size_t> counts;
  // [cluster][image]
  std::vector<std::vector<std::size_t>> image_counts;
  std::vector<std::vector<std::array<double, 2>>> spatial_centroids;
  std::vector<ImageDims> dims;
  // Within-cluster sum of squares after every assignment step.
  std::vector<double> objective_history;
  int iterations = 0;

  std::size_t total() const;
};

struct CueVector {
  std::vector<double> contrast;
  std::vector<double> spatial;
  std::vector<double> corresponding;  // empty in single-image mode
  std::vector<double> combined;
};

struct CosParams {
  int k_single = 6;
  int k_multi = 10;
  double sigma_s = 0.5;  // fraction of the half diagonal
  std::uint64_t seed = 0;
  int max_iter = 100;
  int max_side = 128;

  void validate() const;
};

// sRGB (D65) to CIE Lab, unscaled: L in [0,100].
Lab srgb_to_lab(double r, double g, double b);

PixelFeatureSet extract_pixel_features(const std::vector<RasterImage>& imgs);

/// k-means++ seeding followed by Lloyd iterations to an assignment fixpoint.
/// Empty clusters are re-seeded from the point farthest from its centroid.
/// Throws InvalidInput when k exceeds the pixel count.
ClusterModel kmeans(const PixelFeatureSet& features, int k, std::uint64_t seed,
                    int max_iter = 100);

// Size-weighted color distance to every other cluster: rare colors score high.
std::vector<double> contrast_cue(const ClusterModel& model);

// Gaussian falloff of the cluster's spatial centroid from the image center.
std::vector<double> spatial_cue(const ClusterModel& model, double sigma_s);

// 1 - Var_j(q_k(j)) / Var_max over the per-image share of each cluster.
std::vector<double> corresponding_cue(const ClusterModel& model);

CueVector combine_cues(std::vector<double> contrast, std::vector<double> spatial,
                       std::vector<double> corresponding = {});

CueVector compute_cues(const ClusterModel& model, const CosParams& params);

std::vector<GrayMap> cos_saliency(const std::vector<RasterImage>& imgs, const CosParams& params);

GrayMap cos_saliency(const RasterImage& img, const CosParams& params);

}  // namespace salfuse::cos
