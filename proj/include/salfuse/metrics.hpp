#pragma once

#include <string>
#include <vector>

#include "salfuse/fusion.hpp"

namespace salfuse::metrics {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::size_t> counts;  // C x C

  std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * classes.size() + pred]; }
  std::size_t total() const;
};

struct ClassMetrics {
  std::string name;
  std::size_t support = 0;  // true samples of the class
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_f = 0.0;
  double weighted_g = 0.0;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;
};

// Predictions and truth are matched by sample id. Classes default to the
// sorted union of labels. Throws AlignmentError when the sample sets
// differ and InvalidInput on empty input or labels outside `classes`.
ConfusionMatrix confusion_matrix(const fusion::LabelVector& pred, const fusion::LabelVector& truth,
                                 std::vector<std::string> classes = {});

MetricsReport evaluate(const fusion::LabelVector& pred, const fusion::LabelVector& truth,
                       std::vector<std::string> classes = {});

double accuracy(const fusion::LabelVector& pred, const fusion::LabelVector& truth);

// Support-weighted mean of one-vs-all F1 (0 when precision + recall = 0).
double weighted_f_score(const fusion::LabelVector& pred, const fusion::LabelVector& truth);

// Support-weighted mean of one-vs-all sqrt(TPR * TNR), zero-denominator rates are 0.
double weighted_g_mean(const fusion::LabelVector& pred, const fusion::LabelVector& truth);

}  // namespace salfuse::metrics
