#pragma once

// Reference computations that share no code with the library paths they
// check: a dense linear solve for stationary distributions, a naive DFT,
// and a per-class counting evaluator for the classification metrics.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace salfuse::oracle {

// Solves pi (P - I) = 0 with sum(pi) = 1 by replacing one equation.
inline std::vector<double> stationary_direct(const std::vector<double>& p, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(j, i) = p[i * n + j] - (i == j ? 1.0 : 0.0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.row(n - 1).setOnes();
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

// O(N^2) 2-D DFT of a real row-major map.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& m, int h, int w) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * w);
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double angle = -2.0 * M_PI * (static_cast<double>(u) * y / h + static_cast<double>(v) * x / w);
          acc += m[static_cast<std::size_t>(y) * w + x] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      out[static_cast<std::size_t>(u) * w + v] = acc;
    }
  return out;
}

struct MetricTriple {
  double accuracy = 0.0;
  double weighted_f = 0.0;
  double weighted_g = 0.0;
};

// Counts TP/FP/FN/TN for every class with a separate pass over the samples.
inline MetricTriple brute_force_metrics(const std::vector<std::string>& truth,
                                        const std::vector<std::string>& pred) {
  const std::size_t s = truth.size();
  std::set<std::string> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  MetricTriple out;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s; ++i) correct += truth[i] == pred[i] ? 1 : 0;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(s);
  for (const auto& c : classes) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const bool is_true = truth[i] == c;
      const bool is_pred = pred[i] == c;
      if (is_true && is_pred) tp += 1;
      else if (!is_true && is_pred) fp += 1;
      else if (is_true && !is_pred) fn += 1;
      else tn += 1;
    }
    const double support = tp + fn;
    if (support == 0) continue;
    const double precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp / support;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    const double tnr = (tn + fp) > 0 ? tn / (tn + fp) : 0.0;
    const double weight = support / static_cast<double>(s);
    out.weighted_f += weight * f1;
    out.weighted_g += weight * std::sqrt(recall * tnr);
  }
  return out;
}

}  // namespace salfuse::oracle
