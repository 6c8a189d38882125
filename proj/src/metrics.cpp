#include "salfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "salfuse/error.hpp"

namespace salfuse::metrics {

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion_matrix(const fusion::LabelVector& pred, const fusion::LabelVector& truth,
                                 std::vector<std::string> classes) {
  if (pred.size() == 0 || truth.size() == 0) throw InvalidInput("cannot evaluate an empty prediction set");
  if (pred.sample_ids.size() != pred.labels.size() || truth.sample_ids.size() != truth.labels.size())
    throw InvalidInput("label vector has mismatched id/label lengths");

  std::map<std::string_view, std::string_view> truth_by_id;
  for (std::size_t i = 0; i < truth.size(); ++i) truth_by_id[truth.sample_ids[i]] = truth.labels[i];
  std::set<std::string_view> pred_ids(pred.sample_ids.begin(), pred.sample_ids.end());
  if (pred_ids.size() != pred.size()) throw InvalidInput("duplicate sample id in predictions");
  std::vector<std::string> missing, extra;
  for (const auto& id : pred.sample_ids)
    if (!truth_by_id.count(id)) missing.push_back(id);
  for (const auto& [id, label] : truth_by_id)
    if (!pred_ids.count(id)) extra.push_back(std::string(id));
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "predictions and truth cover different samples; without truth: [";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += (i ? ", " : "") + missing[i];
    msg += "]; without prediction: [";
    for (std::size_t i = 0; i < extra.size() && i < 20; ++i) msg += (i ? ", " : "") + extra[i];
    msg += "]";
    throw AlignmentError(msg);
  }

  if (classes.empty()) {
    std::set<std::string> all(pred.labels.begin(), pred.labels.end());
    all.insert(truth.labels.begin(), truth.labels.end());
    classes.assign(all.begin(), all.end());
  }
  std::map<std::string_view, std::size_t> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c]] = c;

  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size() * classes.size(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::string_view t = truth_by_id[pred.sample_ids[i]];
    const auto ti = index.find(t);
    const auto pi = index.find(pred.labels[i]);
    if (ti == index.end()) throw InvalidInput("true label '" + std::string(t) + "' is not a known class");
    if (pi == index.end()) throw InvalidInput("predicted label '" + pred.labels[i] + "' is not a known class");
    ++cm.counts[ti->second * classes.size() + pi->second];
  }
  return cm;
}

MetricsReport evaluate(const fusion::LabelVector& pred, const fusion::LabelVector& truth,
                       std::vector<std::string> classes) {
  MetricsReport report;
  report.confusion = confusion_matrix(pred, truth, std::move(classes));
  const ConfusionMatrix& cm = report.confusion;
  const std::size_t n_classes = cm.classes.size();
  const double total = static_cast<double>(cm.total());

  std::size_t correct = 0;
  for (std::size_t c = 0; c < n_classes; ++c) correct += cm.at(c, c);
  report.accuracy = static_cast<double>(correct) / total;

  for (std::size_t c = 0; c < n_classes; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      row += cm.at(c, k);
      col += cm.at(k, c);
    }
    const double tp = static_cast<double>(cm.at(c, c));
    const double fn = static_cast<double>(row) - tp;
    const double fp = static_cast<double>(col) - tp;
    const double tn = total - tp - fn - fp;

    ClassMetrics m;
    m.name = cm.classes[c];
    m.support = row;
    m.precision = safe_ratio(tp, tp + fp);
    m.recall = safe_ratio(tp, tp + fn);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.tpr = m.recall;
    m.tnr = safe_ratio(tn, tn + fp);

    const double weight = static_cast<double>(row) / total;
    report.weighted_f += weight * m.f1;
    report.weighted_g += weight * std::sqrt(m.tpr * m.tnr);
    report.per_class.push_back(std::move(m));
  }
  return report;
}

double accuracy(const fusion::LabelVector& pred, const fusion::LabelVector& truth) {
  return evaluate(pred, truth).accuracy;
}

double weighted_f_score(const fusion::LabelVector& pred, const fusion::LabelVector& truth) {
  return evaluate(pred, truth).weighted_f;
}

double weighted_g_mean(const fusion::LabelVector& pred, const fusion::LabelVector& truth) {
  return evaluate(pred, truth).weighted_g;
}

}  // namespace salfuse::metrics
