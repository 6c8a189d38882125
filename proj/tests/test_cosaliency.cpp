#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "salfuse/cosaliency.hpp"
#include "salfuse/error.hpp"
#include "support.hpp"

using namespace salfuse;
using namespace salfuse::cos;

namespace {

// Hand-built model: cluster sizes and centroids, single image of given dims.
ClusterModel manual_model(std::vector<std::size_t> counts, std::vector<Lab> centroids,
                          std::vector<std::array<double, 2>> spatial, ImageDims dims) {
  ClusterModel m;
  m.k = static_cast<int>(counts.size());
  m.counts = counts;
  m.centroids = std::move(centroids);
  m.dims = {dims};
  for (int k = 0; k < m.k; ++k) {
    m.image_counts.push_back({counts[k]});
    m.spatial_centroids.push_back({spatial[k]});
  }
  return m;
}

double dist(const Lab& a, const Lab& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

RasterImage two_blobs(std::mt19937_64& rng) {
  std::normal_distribution<float> noise(0.0f, 0.01f);
  RasterImage img(20, 20, 3);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const bool left = x < 10;
      const float base[3] = {left ? 0.8f : 0.1f, left ? 0.2f : 0.7f, left ? 0.1f : 0.3f};
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = std::clamp(base[c] + noise(rng), 0.0f, 1.0f);
    }
  return img;
}

}  // namespace

TEST_CASE("pixel features") {
  const PixelFeatureSet f = extract_pixel_features({testing::solid_rgb(2, 3, 1, 1, 1)});
  CHECK(f.size() == 6);
  CHECK(f.image_count() == 1);
  CHECK(f.color[0][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.color[0][1] == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
  CHECK(f.color[0] == f.color[5]);
  for (const auto& p : f.position) {
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[1] > 0.0);
    CHECK(p[1] < 1.0);
  }

  const PixelFeatureSet rb = extract_pixel_features(
      {testing::solid_rgb(1, 1, 1, 0, 0), testing::solid_rgb(1, 1, 0, 0, 1)});
  const PixelFeatureSet gg = extract_pixel_features(
      {testing::solid_rgb(1, 1, 0.5f, 0.5f, 0.5f),
       testing::solid_rgb(1, 1, 0.5f + 1 / 255.0f, 0.5f + 1 / 255.0f, 0.5f + 1 / 255.0f)});
  CHECK(dist(rb.color[0], rb.color[1]) > dist(gg.color[0], gg.color[1]));
  CHECK(rb.image == std::vector<int>{0, 1});

  CHECK_THROWS_AS(extract_pixel_features({}), InvalidInput);
}

TEST_CASE("lab reference values") {
  const Lab white = srgb_to_lab(1, 1, 1);
  CHECK(white[0] == doctest::Approx(100.0).epsilon(1e-4));
  CHECK(std::abs(white[1]) < 1e-3);
  CHECK(std::abs(white[2]) < 1e-3);
  const Lab red = srgb_to_lab(1, 0, 0);
  CHECK(red[0] == doctest::Approx(53.24).epsilon(1e-3));
  CHECK(red[1] == doctest::Approx(80.09).epsilon(1e-3));
  CHECK(red[2] == doctest::Approx(67.20).epsilon(1e-3));
}

TEST_CASE("kmeans with one cluster gives the global mean") {
  std::mt19937_64 rng(1);
  const PixelFeatureSet f = extract_pixel_features({two_blobs(rng)});
  const ClusterModel m = kmeans(f, 1, 7);
  Lab mean{0, 0, 0};
  for (const auto& c : f.color)
    for (int d = 0; d < 3; ++d) mean[d] += c[d] / static_cast<double>(f.size());
  for (int d = 0; d < 3; ++d) CHECK(m.centroids[0][d] == doctest::Approx(mean[d]).epsilon(1e-12));
  CHECK(m.counts[0] == f.size());
}

TEST_CASE("kmeans separates two blobs and is deterministic") {
  std::mt19937_64 rng(2);
  const PixelFeatureSet f = extract_pixel_features({two_blobs(rng)});
  const ClusterModel m = kmeans(f, 2, 42);
  const int left = m.assignment[0];
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) CHECK((m.assignment[y * 20 + x] == left) == (x < 10));

  const ClusterModel again = kmeans(f, 2, 42);
  CHECK(again.assignment == m.assignment);
  CHECK(again.centroids == m.centroids);
  CHECK(again.objective_history == m.objective_history);
}

TEST_CASE("property: kmeans invariants") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 10; ++trial) {
    RasterImage img(12, 9, 3);
    for (float& v : img.data()) v = u(rng);
    const PixelFeatureSet f = extract_pixel_features({img});
    const int k = 1 + trial % 7;
    const ClusterModel m = kmeans(f, k, trial);
    CHECK(m.total() == f.size());
    for (int a : m.assignment) {
      CHECK(a >= 0);
      CHECK(a < k);
    }
    for (std::size_t i = 1; i < m.objective_history.size(); ++i)
      CHECK(m.objective_history[i] <= m.objective_history[i - 1] + 1e-12);
    for (int c = 0; c < k; ++c) {
      if (m.counts[c] == 0) continue;
      Lab mean{0, 0, 0};
      for (std::size_t i = 0; i < f.size(); ++i)
        if (m.assignment[i] == c)
          for (int d = 0; d < 3; ++d) mean[d] += f.color[i][d];
      for (int d = 0; d < 3; ++d) CHECK(std::abs(mean[d] / m.counts[c] - m.centroids[c][d]) < 1e-6);
    }
    // Fixpoint: every point is at its nearest centroid.
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double own = dist(f.color[i], m.centroids[m.assignment[i]]);
      for (int c = 0; c < k; ++c)
        if (m.counts[c] > 0) CHECK(own <= dist(f.color[i], m.centroids[c]) + 1e-12);
    }
  }
}

TEST_CASE("kmeans rejects k above the pixel count") {
  const PixelFeatureSet f = extract_pixel_features({testing::solid_rgb(2, 2, 0, 0, 0)});
  CHECK_THROWS_AS(kmeans(f, 5, 0), InvalidInput);
}

TEST_CASE("contrast cue examples") {
  const ImageDims dims{10, 10};
  CHECK(contrast_cue(manual_model({10}, {Lab{0.5, 0.5, 0.5}}, {{{0.5, 0.5}}}, dims)) ==
        std::vector<double>{0.0});

  const auto equal = contrast_cue(manual_model({50, 50}, {Lab{0, 0, 0}, Lab{0.3, 0.4, 0}},
                                               {{{0.5, 0.5}}, {{0.5, 0.5}}}, dims));
  CHECK(equal[0] == equal[1]);

  const auto rare = contrast_cue(manual_model({90, 10}, {Lab{0, 0, 0}, Lab{1, 0, 0}},
                                              {{{0.5, 0.5}}, {{0.5, 0.5}}}, dims));
  CHECK(std::abs(rare[0] - 0.1) <= 1e-9);
  CHECK(std::abs(rare[1] - 0.9) <= 1e-9);
}

TEST_CASE("spatial cue examples") {
  const ImageDims dims{30, 40};  // half diagonal 25
  const double sigma_s = 0.5;
  // centroid offset (0.5 * 25) along x: normalized x = 0.5 + 12.5 / 40
  const auto cue = spatial_cue(
      manual_model({5, 5, 5}, {Lab{0, 0, 0}, Lab{1, 0, 0}, Lab{0, 1, 0}},
                   {{{0.5, 0.5}}, {{0.5 + 12.5 / 40.0, 0.5}}, {{0.0, 0.0}}}, dims),
      sigma_s);
  CHECK(cue[0] == 1.0);
  CHECK(std::abs(cue[1] - std::exp(-0.5)) <= 1e-9);
  CHECK(cue[2] < cue[0]);
  CHECK(cue[2] > 0.0);
}

TEST_CASE("corresponding cue examples") {
  ClusterModel m;
  m.k = 3;
  m.counts = {8, 10, 6};
  m.dims = {{4, 4}, {4, 4}};
  m.image_counts = {{4, 4}, {10, 0}, {0, 6}};
  const auto u = corresponding_cue(m);
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(0.0));
  CHECK(u[2] == doctest::Approx(0.0));

  m.k = 1;
  m.counts = {8};
  m.image_counts = {{6, 2}};
  CHECK(std::abs(corresponding_cue(m)[0] - 0.75) <= 1e-9);

  m.dims = {{4, 4}};
  m.image_counts = {{8}};
  CHECK_THROWS_AS(corresponding_cue(m), InvalidInput);
}

TEST_CASE("combined cue normalization") {
  const CueVector c = combine_cues({0.2, 0.5, 0.0}, {1.0, 0.5, 1.0});
  CHECK(c.combined[0] == doctest::Approx(0.8));
  CHECK(c.combined[1] == 1.0);
  CHECK(c.combined[2] == 0.0);
  const CueVector z = combine_cues({0.0, 0.0}, {1.0, 1.0});
  CHECK(z.combined == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(combine_cues({1.0}, {1.0, 1.0}), InvalidInput);
}

TEST_CASE("single-color image gives an all-zero map") {
  const GrayMap s = cos_saliency(testing::solid_rgb(16, 16, 0.2f, 0.6f, 0.3f), CosParams{});
  for (double v : s.data()) CHECK(v == 0.0);
}

TEST_CASE("red disk wins the combined cue") {
  const int size = 64;
  const RasterImage img = testing::red_disk_image(size);
  CosParams params;
  const PixelFeatureSet f = extract_pixel_features({img});
  const ClusterModel m = kmeans(f, params.k_single, params.seed);
  const CueVector cues = compute_cues(m, params);
  const int center = m.assignment[(size / 2) * size + size / 2];
  for (int k = 0; k < m.k; ++k)
    if (k != center) CHECK(cues.combined[k] < cues.combined[center]);

  const GrayMap s = cos_saliency(img, params);
  const double threshold = 1.5 * s.mean();
  int disk = 0, above = 0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (testing::in_red_disk(size, y, x)) {
        ++disk;
        above += s.at(y, x) > threshold ? 1 : 0;
      }
  CHECK(above >= 0.9 * disk);
}

TEST_CASE("multi-image: shared disk beats a one-off blob") {
  RasterImage a = testing::red_disk_image(48);
  RasterImage b = testing::red_disk_image(48);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      b.at(y, x, 0) = 0.95f;
      b.at(y, x, 1) = 0.9f;
      b.at(y, x, 2) = 0.1f;
    }
  CosParams params;
  params.k_multi = 3;
  const PixelFeatureSet f = extract_pixel_features({a, b});
  const ClusterModel m = kmeans(f, params.k_multi, params.seed);
  const CueVector cues = compute_cues(m, params);
  const int disk = m.assignment[24 * 48 + 24];
  const int blob = m.assignment[48 * 48 + 0];
  CHECK(disk != blob);
  CHECK(cues.corresponding[disk] > cues.corresponding[blob]);
  CHECK(cues.corresponding[blob] == doctest::Approx(0.0));

  const auto maps = cos_saliency({a, b}, params);
  CHECK(maps.size() == 2);
  CHECK(maps[1].height() == 48);
}

TEST_CASE("determinism and independence from other calls") {
  std::mt19937_64 rng(9);
  const RasterImage img = two_blobs(rng);
  CosParams params;
  params.seed = 1234;
  const GrayMap a = cos_saliency(img, params);
  cos_saliency(testing::red_disk_image(32), params);
  CHECK(cos_saliency(img, params) == a);
}

TEST_CASE("large images are downsampled for clustering") {
  const RasterImage img = testing::red_disk_image(300);
  const GrayMap s = cos_saliency(img, CosParams{});
  CHECK(s.height() == 300);
  CHECK(s.width() == 300);
  CHECK(s.at(150, 150) > s.at(5, 5));
}
