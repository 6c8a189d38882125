#pragma once

#include <optional>
#include <vector>

#include "salfuse/imaging.hpp"

namespace salfuse::gbvs {

struct Pixel {
  int row = 0;
  int col = 0;
};

struct GbvsParams {
  int work_size = 32;            // longest side of the feature map
  std::optional<double> sigma;   // distance decay in pixels; work_size / 6 when unset
  double epsilon = 1e-4;         // feature floor, keeps log finite
  double lambda = 1e-6;          // additive edge weight, makes the chain ergodic
  double tol = 1e-9;             // L1 stationarity residual
  int max_iter = 10000;

  double effective_sigma() const { return sigma ? *sigma : work_size / 6.0; }
  void validate() const;
};

// Feature map clamped into [epsilon, 1].
struct FeatureMap {
  GrayMap map;
  double epsilon = 1e-4;
};

// Dense row-stochastic matrix over flattened feature-map pixels.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(std::size_t n_states, std::vector<double> probs);

  std::size_t n_states() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return probs_[from * n_ + to]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> probs_;
};

struct StationaryResult {
  std::vector<double> pi;
  double residual = 0.0;
  int iterations = 0;
};

FeatureMap build_feature_map(const RasterImage& img, const GbvsParams& params);

// Wraps an existing map, clamping it into [epsilon, 1].
FeatureMap make_feature_map(const GrayMap& map, double epsilon);

/// |log(M(a) / M(b))|. Throws InvalidInput when a pixel is out of bounds.
double dissimilarity(const FeatureMap& m, Pixel a, Pixel b);

/// exp(-(dr^2 + dc^2) / (2 sigma^2)) for the offset between a and b.
double distance_weight(Pixel a, Pixel b, double sigma);

/// Edge weight d(a||b) * F(a - b) + lambda off the diagonal and lambda on it,
/// normalized per row. Throws DegenerateGraph when a row sums to zero.
TransitionMatrix build_transition_matrix(const FeatureMap& m, const GbvsParams& params);

/// Power iteration from the uniform vector until ||pi P - pi||_1 < tol.
/// Updates use the lazy chain (P + I) / 2, which has the same fixed point
/// and does not oscillate on nearly bipartite graphs. Throws
/// ConvergenceError with the last residual when max_iter is exhausted.
StationaryResult stationary_distribution(const TransitionMatrix& p, double tol, int max_iter);

// Saliency of a prepared feature map at its own resolution, normalized.
GrayMap saliency_from_feature_map(const FeatureMap& m, const GbvsParams& params);

GrayMap gbvs_saliency(const RasterImage& img, const GbvsParams& params);

}  // namespace salfuse::gbvs
