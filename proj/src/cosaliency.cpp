#include "salfuse/cosaliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "salfuse/error.hpp"
#include "salfuse/seeding.hpp"

namespace salfuse::cos {

namespace {

double srgb_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

double sq_dist(const Lab& a, const Lab& b) {
  const double d0 = a[0] - b[0];
  const double d1 = a[1] - b[1];
  const double d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

// Index of the nearest of the first `active` centroids, ties toward the lowest index.
int nearest(const Lab& x, const std::vector<Lab>& centroids, int active, double* dist) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < active; ++k) {
    const double d = sq_dist(x, centroids[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<Lab> seed_plus_plus(const PixelFeatureSet& f, int k, Rng& rng) {
  const std::size_t n = f.size();
  std::vector<Lab> centroids;
  centroids.reserve(k);
  centroids.push_back(f.color[static_cast<std::size_t>(rng.uniform_int(0, n - 1))]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(f.color[i], centroids[0]);
  // Stops early when every point already sits on a centroid (fewer
  // distinct colors than k); the remaining clusters stay empty.
  while (static_cast<int>(centroids.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (!(total > 0.0)) break;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    if (pick == n) {
      // Rounding left target past the running sum: take the last candidate.
      for (std::size_t i = n; i-- > 0;)
        if (d2[i] > 0.0) {
          pick = i;
          break;
        }
    }
    centroids.push_back(f.color[pick]);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(f.color[i], centroids.back()));
  }
  return centroids;
}

void recompute_centroids(const PixelFeatureSet& f, ClusterModel& m) {
  std::vector<Lab> sums(m.k, Lab{0.0, 0.0, 0.0});
  std::fill(m.counts.begin(), m.counts.end(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int c = m.assignment[i];
    for (int d = 0; d < 3; ++d) sums[c][d] += f.color[i][d];
    ++m.counts[c];
  }
  for (int c = 0; c < m.k; ++c) {
    if (m.counts[c] == 0) continue;
    for (int d = 0; d < 3; ++d) m.centroids[c][d] = sums[c][d] / static_cast<double>(m.counts[c]);
  }
}

}  // namespace

std::size_t ClusterModel::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

void CosParams::validate() const {
  if (k_single < 1 || k_multi < 1) throw ConfigError("cos cluster counts must be >= 1");
  if (!(sigma_s > 0.0)) throw ConfigError("cos.sigma_s must be > 0");
  if (max_iter < 1) throw ConfigError("cos.max_iter must be >= 1");
  if (max_side < 1) throw ConfigError("cos.max_side must be >= 1");
}

Lab srgb_to_lab(double r, double g, double b) {
  const double rl = srgb_linear(r);
  const double gl = srgb_linear(g);
  const double bl = srgb_linear(b);
  const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  const double fx = lab_f(x / 0.95047);
  const double fy = lab_f(y / 1.0);
  const double fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

PixelFeatureSet extract_pixel_features(const std::vector<RasterImage>& imgs) {
  if (imgs.empty()) throw InvalidInput("co-saliency needs at least one image");
  PixelFeatureSet f;
  std::size_t total = 0;
  for (const auto& img : imgs) total += img.pixel_count();
  f.color.reserve(total);
  f.position.reserve(total);
  f.image.reserve(total);
  for (int j = 0; j < static_cast<int>(imgs.size()); ++j) {
    const RasterImage& img = imgs[j];
    if (img.channels() != 1 && img.channels() != 3)
      throw InvalidInput("co-saliency expects 1- or 3-channel images");
    if (img.empty()) throw InvalidInput("co-saliency input image " + std::to_string(j) + " is empty");
    f.dims.push_back({img.height(), img.width()});
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        const double red = img.at(r, c, 0);
        const double green = img.channels() == 3 ? img.at(r, c, 1) : red;
        const double blue = img.channels() == 3 ? img.at(r, c, 2) : red;
        const Lab lab = srgb_to_lab(red, green, blue);
        f.color.push_back({lab[0] / 100.0, (lab[1] + 128.0) / 255.0, (lab[2] + 128.0) / 255.0});
        f.position.push_back({(c + 0.5) / img.width(), (r + 0.5) / img.height()});
        f.image.push_back(j);
      }
    }
  }
  return f;
}

ClusterModel kmeans(const PixelFeatureSet& features, int k, std::uint64_t seed, int max_iter) {
  const std::size_t n = features.size();
  if (k < 1) throw InvalidInput("k-means needs k >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw InvalidInput("k-means: k = " + std::to_string(k) + " exceeds pixel count " +
                       std::to_string(n));
  }
  Rng rng(seed);
  ClusterModel m;
  m.k = k;
  m.dims = features.dims;
  m.centroids = seed_plus_plus(features, k, rng);
  const int active = static_cast<int>(m.centroids.size());
  m.centroids.resize(k, m.centroids.front());
  m.assignment.assign(n, -1);
  m.counts.assign(k, 0);

  std::vector<double> dist(n);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest(features.color[i], m.centroids, active, &dist[i]);
      if (c != m.assignment[i]) {
        m.assignment[i] = c;
        changed = true;
      }
      objective += dist[i];
    }
    m.objective_history.push_back(objective);
    m.iterations = it + 1;
    if (!changed) break;
    recompute_centroids(features, m);

    // Re-seed empty clusters from the worst-fit points, one point each.
    bool reseeded = false;
    for (int c = 0; c < active; ++c) {
      if (m.counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_dist(features.color[i], m.centroids[m.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d <= 0.0) break;  // every point sits on its centroid
      const int old = m.assignment[far];
      m.centroids[c] = features.color[far];
      m.assignment[far] = c;
      --m.counts[old];
      m.counts[c] = 1;
      reseeded = true;
    }
    if (reseeded) recompute_centroids(features, m);
  }
  recompute_centroids(features, m);

  const int images = features.image_count();
  m.image_counts.assign(k, std::vector<std::size_t>(images, 0));
  m.spatial_centroids.assign(k, std::vector<std::array<double, 2>>(images, {0.0, 0.0}));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = m.assignment[i];
    const int j = features.image[i];
    ++m.image_counts[c][j];
    m.spatial_centroids[c][j][0] += features.position[i][0];
    m.spatial_centroids[c][j][1] += features.position[i][1];
  }
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < images; ++j)
      if (m.image_counts[c][j] > 0) {
        m.spatial_centroids[c][j][0] /= static_cast<double>(m.image_counts[c][j]);
        m.spatial_centroids[c][j][1] /= static_cast<double>(m.image_counts[c][j]);
      }
  return m;
}

std::vector<double> contrast_cue(const ClusterModel& model) {
  const double total = static_cast<double>(model.total());
  std::vector<double> cue(model.k, 0.0);
  if (total <= 0.0) return cue;
  for (int k = 0; k < model.k; ++k) {
    if (model.counts[k] == 0) continue;
    double acc = 0.0;
    for (int i = 0; i < model.k; ++i) {
      if (i == k || model.counts[i] == 0) continue;
      acc += (static_cast<double>(model.counts[i]) / total) *
             std::sqrt(sq_dist(model.centroids[k], model.centroids[i]));
    }
    cue[k] = acc;
  }
  return cue;
}

std::vector<double> spatial_cue(const ClusterModel& model, double sigma_s) {
  if (!(sigma_s > 0.0)) throw InvalidInput("spatial cue scale must be > 0");
  std::vector<double> cue(model.k, 0.0);
  for (int k = 0; k < model.k; ++k) {
    if (model.counts[k] == 0) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < model.dims.size(); ++j) {
      const std::size_t nkj = model.image_counts[k][j];
      if (nkj == 0) continue;
      const double w = model.dims[j].width;
      const double h = model.dims[j].height;
      const double dx = model.spatial_centroids[k][j][0] * w - w / 2.0;
      const double dy = model.spatial_centroids[k][j][1] * h - h / 2.0;
      const double scale = sigma_s * std::sqrt(w * w + h * h) / 2.0;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * scale * scale));
      acc += (static_cast<double>(nkj) / static_cast<double>(model.counts[k])) * v;
    }
    cue[k] = acc;
  }
  return cue;
}

std::vector<double> corresponding_cue(const ClusterModel& model) {
  const int images = static_cast<int>(model.dims.size());
  if (images < 2) {
    throw InvalidInput("corresponding cue needs at least two images, got " +
                       std::to_string(images));
  }
  const double var_max = static_cast<double>(images - 1) / (static_cast<double>(images) * images);
  std::vector<double> cue(model.k, 0.0);
  for (int k = 0; k < model.k; ++k) {
    if (model.counts[k] == 0) continue;
    std::vector<double> q(images);
    for (int j = 0; j < images; ++j)
      q[j] = static_cast<double>(model.image_counts[k][j]) / static_cast<double>(model.counts[k]);
    const double mean = 1.0 / images;
    double var = 0.0;
    for (double v : q) var += (v - mean) * (v - mean);
    var /= images;
    cue[k] = std::clamp(1.0 - var / var_max, 0.0, 1.0);
  }
  return cue;
}

CueVector combine_cues(std::vector<double> contrast, std::vector<double> spatial,
                       std::vector<double> corresponding) {
  CueVector cues{std::move(contrast), std::move(spatial), std::move(corresponding), {}};
  const std::size_t k = cues.contrast.size();
  if (cues.spatial.size() != k || (!cues.corresponding.empty() && cues.corresponding.size() != k))
    throw InvalidInput("cue vectors have different lengths");
  cues.combined.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    double v = cues.contrast[i] * cues.spatial[i];
    if (!cues.corresponding.empty()) v *= cues.corresponding[i];
    cues.combined[i] = v;
  }
  const double top = k == 0 ? 0.0 : *std::max_element(cues.combined.begin(), cues.combined.end());
  if (top > 0.0)
    for (double& v : cues.combined) v /= top;
  return cues;
}

CueVector compute_cues(const ClusterModel& model, const CosParams& params) {
  auto contrast = contrast_cue(model);
  auto spatial = spatial_cue(model, params.sigma_s);
  if (model.dims.size() < 2) return combine_cues(std::move(contrast), std::move(spatial));
  return combine_cues(std::move(contrast), std::move(spatial), corresponding_cue(model));
}

std::vector<GrayMap> cos_saliency(const std::vector<RasterImage>& imgs, const CosParams& params) {
  params.validate();
  if (imgs.empty()) throw InvalidInput("co-saliency needs at least one image");
  std::vector<RasterImage> work;
  work.reserve(imgs.size());
  for (const auto& img : imgs) {
    const auto [h, w] = fit_within(img.height(), img.width(), params.max_side);
    work.push_back(resize_image(img, h, w));
  }
  const PixelFeatureSet features = extract_pixel_features(work);
  const int k = imgs.size() == 1 ? params.k_single : params.k_multi;
  const ClusterModel model = kmeans(features, k, params.seed, params.max_iter);
  const CueVector cues = compute_cues(model, params);

  std::vector<GrayMap> maps;
  maps.reserve(imgs.size());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < work.size(); ++j) {
    GrayMap sal(work[j].height(), work[j].width());
    for (std::size_t p = 0; p < sal.size(); ++p) sal[p] = cues.combined[model.assignment[offset + p]];
    offset += sal.size();
    maps.push_back(resize_bilinear(normalize_map(sal), imgs[j].height(), imgs[j].width()));
  }
  return maps;
}

GrayMap cos_saliency(const RasterImage& img, const CosParams& params) {
  return cos_saliency(std::vector<RasterImage>{img}, params).front();
}

}  // namespace salfuse::cos
