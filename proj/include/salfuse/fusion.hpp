#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace salfuse::fusion {

// Free-form tags from the score file's #model line, e.g. arch=DN,
// method=SPE, derivation=FG_ROI.
using ModelTags = std::map<std::string, std::string>;

struct ScoreMatrix {
  std::string model_id;
  ModelTags tags;
  std::vector<std::string> sample_ids;
  std::vector<std::string> class_names;
  std::vector<double> scores;  // row-major S x C

  std::size_t samples() const { return sample_ids.size(); }
  std::size_t classes() const { return class_names.size(); }
  double at(std::size_t s, std::size_t c) const { return scores[s * class_names.size() + c]; }
  double& at(std::size_t s, std::size_t c) { return scores[s * class_names.size() + c]; }

  std::string tag(const std::string& key) const;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

struct LabelVector {
  std::vector<std::string> sample_ids;
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

/// Parses the tab-separated score format: a #classes line, a #model line,
/// then one `sample_id<TAB>v1..vC` row per sample. Rows whose sum strays
/// from 1 by more than 0.01 are kept and reported through `warnings`.
/// Throws ParseError naming the line on malformed input.
ScoreMatrix load_scores(const std::filesystem::path& path,
                        std::vector<std::string>* warnings = nullptr);
ScoreMatrix parse_scores(const std::string& text, const std::string& source,
                         std::vector<std::string>* warnings = nullptr);
void write_scores(const std::filesystem::path& path, const ScoreMatrix& m);
std::string format_scores(const ScoreMatrix& m);

LabelVector load_truth(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

/// Elementwise sum of the members. Members are ordered by model id and
/// samples by id before adding, so the result does not depend on the input
/// order. Throws AlignmentError listing the symmetric difference when
/// classes or sample sets disagree.
ScoreMatrix sum_rule(const std::vector<ScoreMatrix>& matrices);

// Per-sample argmax, ties toward the lowest class index.
LabelVector predict(const ScoreMatrix& m);

}  // namespace salfuse::fusion
