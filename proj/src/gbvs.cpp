#include "salfuse/gbvs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "salfuse/error.hpp"

namespace salfuse::gbvs {

void GbvsParams::validate() const {
  if (work_size < 1) throw ConfigError("gbvs.work_size must be >= 1");
  if (!(effective_sigma() > 0.0)) throw ConfigError("gbvs.sigma must be > 0");
  if (!(epsilon > 0.0) || epsilon > 1.0) throw ConfigError("gbvs.epsilon must be in (0,1]");
  if (!(lambda >= 0.0)) throw ConfigError("gbvs.lambda must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("gbvs.tol must be > 0");
  if (max_iter < 1) throw ConfigError("gbvs.max_iter must be >= 1");
}

TransitionMatrix::TransitionMatrix(std::size_t n_states, std::vector<double> probs)
    : n_(n_states), probs_(std::move(probs)) {
  if (probs_.size() != n_ * n_) throw InvalidInput("transition matrix must be n x n");
}

namespace {

// |log(x / y)| with the larger value on top, so swapping x and y is exact.
double log_ratio(double x, double y) { return std::log(std::max(x, y) / std::min(x, y)); }

}  // namespace

FeatureMap make_feature_map(const GrayMap& map, double epsilon) {
  FeatureMap fm{map, epsilon};
  for (double& v : fm.map.data()) v = std::clamp(v, epsilon, 1.0);
  return fm;
}

FeatureMap build_feature_map(const RasterImage& img, const GbvsParams& params) {
  params.validate();
  const GrayMap lum = rgb_to_luminance(img);
  const auto [h, w] = fit_within(lum.height(), lum.width(), params.work_size);
  return make_feature_map(resize_bilinear(lum, h, w), params.epsilon);
}

double dissimilarity(const FeatureMap& m, Pixel a, Pixel b) {
  const auto in_bounds = [&](Pixel p) {
    return p.row >= 0 && p.col >= 0 && p.row < m.map.height() && p.col < m.map.width();
  };
  if (!in_bounds(a) || !in_bounds(b)) throw InvalidInput("dissimilarity: pixel out of bounds");
  return log_ratio(m.map.at(a.row, a.col), m.map.at(b.row, b.col));
}

double distance_weight(Pixel a, Pixel b, double sigma) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
}

TransitionMatrix build_transition_matrix(const FeatureMap& m, const GbvsParams& params) {
  const int h = m.map.height();
  const int w = m.map.width();
  const std::size_t n = m.map.size();
  if (n == 0) throw InvalidInput("feature map is empty");
  const double sigma = params.effective_sigma();
  if (!(sigma > 0.0)) throw ConfigError("gbvs.sigma must be > 0");

  // Distance kernel indexed by absolute offset.
  std::vector<double> kernel(static_cast<std::size_t>(h) * w);
  for (int dr = 0; dr < h; ++dr)
    for (int dc = 0; dc < w; ++dc)
      kernel[static_cast<std::size_t>(dr) * w + dc] = distance_weight({dr, dc}, {0, 0}, sigma);

  std::vector<double> probs(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const int ar = static_cast<int>(a) / w;
    const int ac = static_cast<int>(a) % w;
    double* row = probs.data() + a * n;
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double weight = params.lambda;
      if (b != a) {
        const int br = static_cast<int>(b) / w;
        const int bc = static_cast<int>(b) % w;
        const double f = kernel[static_cast<std::size_t>(std::abs(ar - br)) * w + std::abs(ac - bc)];
        weight += log_ratio(m.map[a], m.map[b]) * f;
      }
      row[b] = weight;
      sum += weight;
    }
    if (!(sum > 0.0)) {
      throw DegenerateGraph("transition row " + std::to_string(a) +
                            " has zero total weight; the feature map is locally constant, "
                            "set gbvs.lambda > 0");
    }
    for (std::size_t b = 0; b < n; ++b) row[b] /= sum;
  }
  return TransitionMatrix(n, std::move(probs));
}

namespace {

// out = pi * P
void left_multiply(const TransitionMatrix& p, const std::vector<double>& pi,
                   std::vector<double>& out) {
  const std::size_t n = p.n_states();
  std::fill(out.begin(), out.end(), 0.0);
  const double* probs = p.probs().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = pi[i];
    const double* row = probs + i * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += weight * row[j];
  }
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

}  // namespace

StationaryResult stationary_distribution(const TransitionMatrix& p, double tol, int max_iter) {
  const std::size_t n = p.n_states();
  if (n == 0) throw InvalidInput("transition matrix is empty");
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    left_multiply(p, pi, next);
    residual = l1_distance(next, pi);
    if (residual < tol) return {std::move(pi), residual, it};
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = 0.5 * (pi[i] + next[i]);
      total += pi[i];
    }
    for (double& v : pi) v /= total;
  }
  std::ostringstream msg;
  msg << "stationary distribution did not converge in " << max_iter
      << " iterations (residual " << residual << ", tol " << tol << ")";
  throw ConvergenceError(msg.str(), residual);
}

GrayMap saliency_from_feature_map(const FeatureMap& m, const GbvsParams& params) {
  const TransitionMatrix p = build_transition_matrix(m, params);
  const StationaryResult st = stationary_distribution(p, params.tol, params.max_iter);
  return normalize_map(GrayMap(m.map.height(), m.map.width(), st.pi));
}

GrayMap gbvs_saliency(const RasterImage& img, const GbvsParams& params) {
  const FeatureMap fm = build_feature_map(img, params);
  const GrayMap sal = saliency_from_feature_map(fm, params);
  return resize_bilinear(sal, img.height(), img.width());
}

}  // namespace salfuse::gbvs
