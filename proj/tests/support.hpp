#pragma once

// Synthetic fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "salfuse/image_io.hpp"
#include "salfuse/imaging.hpp"

namespace salfuse::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("salfuse_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline RasterImage solid_rgb(int h, int w, float r, float g, float b) {
  RasterImage img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(y, x, 0) = r;
      img.at(y, x, 1) = g;
      img.at(y, x, 2) = b;
    }
  return img;
}

inline void paint_disk(RasterImage& img, double cy, double cx, double radius, float r, float g,
                       float b) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double dy = y + 0.5 - cy;
      const double dx = x + 0.5 - cx;
      if (dx * dx + dy * dy <= radius * radius) {
        img.at(y, x, 0) = r;
        img.at(y, x, 1) = g;
        img.at(y, x, 2) = b;
      }
    }
}

// Red disk covering ~10% of a blue square, centered.
inline RasterImage red_disk_image(int size = 64) {
  RasterImage img = solid_rgb(size, size, 0.1f, 0.2f, 0.9f);
  const double radius = std::sqrt(0.10 * size * size / M_PI);
  paint_disk(img, size / 2.0, size / 2.0, radius, 0.9f, 0.1f, 0.1f);
  return img;
}

inline bool in_red_disk(int size, int y, int x) {
  const double radius = std::sqrt(0.10 * size * size / M_PI);
  const double dy = y + 0.5 - size / 2.0;
  const double dx = x + 0.5 - size / 2.0;
  return dx * dx + dy * dy <= radius * radius;
}

struct PatchFixture {
  RasterImage image;
  int row = 0;  // top-left of the patch
  int col = 0;
  int size = 4;
};

// Flat gray background with one brighter square patch.
inline PatchFixture bright_patch(std::mt19937_64& rng, int dim = 64, int patch = 4) {
  std::uniform_real_distribution<double> bg(0.1, 0.4);
  std::uniform_int_distribution<int> pos(4, dim - patch - 4);
  PatchFixture f;
  const float level = static_cast<float>(bg(rng));
  f.image = RasterImage(dim, dim, 1, level);
  f.row = pos(rng);
  f.col = pos(rng);
  f.size = patch;
  for (int y = 0; y < patch; ++y)
    for (int x = 0; x < patch; ++x) f.image.at(f.row + y, f.col + x) = 0.95f;
  return f;
}

// A dark elongated "insect" with legs on a veined green leaf.
inline RasterImage insect_on_leaf(int size = 96) {
  RasterImage img(size, size, 3);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double vein = 0.5 + 0.5 * std::sin(0.45 * (x + 0.6 * y));
      const double mid = std::abs(x - 0.3 * y - size * 0.35) < 1.5 ? 0.15 : 0.0;
      img.at(y, x, 0) = static_cast<float>(0.20 + 0.05 * vein + mid);
      img.at(y, x, 1) = static_cast<float>(0.55 + 0.10 * vein + mid);
      img.at(y, x, 2) = static_cast<float>(0.15 + 0.04 * vein);
    }
  const double cy = size * 0.5, cx = size * 0.5;
  const double ay = size * 0.22, ax = size * 0.10;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double ny = (y + 0.5 - cy) / ay;
      const double nx = (x + 0.5 - cx) / ax;
      const bool body = nx * nx + ny * ny <= 1.0;
      bool leg = false;
      for (int k = -1; k <= 1; ++k) {
        const double ly = cy + k * ay * 0.5;
        if (std::abs(y + 0.5 - ly - 0.3 * std::abs(x + 0.5 - cx)) < 1.0 &&
            std::abs(x + 0.5 - cx) < ax * 2.2)
          leg = true;
      }
      if (body || leg) {
        const double spot = (static_cast<int>(nx * 3 + 10) + static_cast<int>(ny * 4 + 10)) % 2;
        img.at(y, x, 0) = static_cast<float>(0.30 + 0.15 * spot);
        img.at(y, x, 1) = static_cast<float>(0.18 + 0.08 * spot);
        img.at(y, x, 2) = static_cast<float>(0.08);
      }
    }
  return img;
}

// Class sizes of the small pest dataset.
inline const std::vector<std::pair<std::string, int>>& pest_class_counts() {
  static const std::vector<std::pair<std::string, int>> counts = {
      {"Locusta_migratoria", 72},          {"Parasa_lepida", 59},
      {"Gypsy_moth_larva", 40},            {"Empoasca_flavescens", 41},
      {"Spodoptera_exigua", 68},           {"Chrysocus_chinensis", 50},
      {"Laspeyresia_pomonella_larva", 50}, {"Spodoptera_exigua_larva", 56},
      {"Atractomorpha_sinensis", 62},      {"Laspeyresia_pomonella", 65},
  };
  return counts;
}

// Small varied RGB image: colored blob on a tinted gradient background.
inline RasterImage synthetic_sample(std::uint64_t seed, int size) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double br = 0.2 + 0.3 * u(rng), bg = 0.3 + 0.3 * u(rng), bb = 0.1 + 0.2 * u(rng);
  RasterImage img(size, size, 3);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double t = 0.15 * (x + y) / (2.0 * size);
      img.at(y, x, 0) = static_cast<float>(br + t);
      img.at(y, x, 1) = static_cast<float>(bg + t);
      img.at(y, x, 2) = static_cast<float>(bb + t);
    }
  const double cy = size * (0.3 + 0.4 * u(rng));
  const double cx = size * (0.3 + 0.4 * u(rng));
  const double radius = size * (0.08 + 0.12 * u(rng));
  paint_disk(img, cy, cx, radius, static_cast<float>(0.6 + 0.4 * u(rng)),
             static_cast<float>(0.3 * u(rng)), static_cast<float>(0.2 * u(rng)));
  return img;
}

// root/<class>/img_NNN.png with the pest class sizes, or custom counts.
inline void write_class_tree(const fs::path& root,
                             const std::vector<std::pair<std::string, int>>& counts, int size,
                             std::uint64_t seed = 1) {
  std::uint64_t n = 0;
  for (const auto& [label, count] : counts) {
    fs::create_directories(root / label);
    for (int i = 0; i < count; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%03d.png", i);
      write_image(root / label / name, synthetic_sample(seed * 1000003ULL + n++, size));
    }
  }
}

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Byte-level comparison of two directory trees (relative paths and contents).
inline bool same_tree(const fs::path& a, const fs::path& b, std::string* why = nullptr) {
  std::vector<std::string> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(e.path().lexically_relative(a).generic_string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(e.path().lexically_relative(b).generic_string());
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) {
    if (why) *why = "file lists differ";
    return false;
  }
  for (const auto& rel : fa) {
    if (read_bytes(a / rel) != read_bytes(b / rel)) {
      if (why) *why = "contents differ: " + rel;
      return false;
    }
  }
  return true;
}

}  // namespace salfuse::testing
