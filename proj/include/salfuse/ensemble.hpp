#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "salfuse/fusion.hpp"
#include "salfuse/metrics.hpp"

namespace salfuse::ensemble {

// A named subset of the loaded score matrices. A matrix is a candidate when
// `all` is set, its id is listed, or it matches every `require` key; it is
// a member when it is a candidate and matches no `exclude` pair.
struct EnsembleSpec {
  std::string name;    // e.g. AllSum\Spectral\DN
  std::string column;  // layout column, usually an architecture tag
  bool all = false;
  std::set<std::string> ids;
  std::map<std::string, std::set<std::string>> require;
  std::vector<std::pair<std::string, std::string>> exclude;
};

/// `name[<TAB>column]<TAB>terms` where terms are space separated:
/// `*`, `id=<model>`, `key=v1,v2`, `-key=value`.
EnsembleSpec parse_spec(const std::string& line);
std::vector<EnsembleSpec> load_specs(const std::filesystem::path& path);

/// Indices of member matrices. Throws ConfigError naming the spec when
/// nothing matches.
std::vector<std::size_t> resolve(const EnsembleSpec& spec,
                                 const std::vector<fusion::ScoreMatrix>& matrices);

/// FusionSum and FusionSum\FG_ROI per architecture, then the AllSum family
/// with \DN rows when a DN architecture is present.
std::vector<EnsembleSpec> standard_specs(const std::vector<fusion::ScoreMatrix>& matrices);

struct ReportRow {
  std::string name;
  std::string column;
  bool is_ensemble = false;
  std::vector<std::string> members;
  std::string method;      // individual rows only
  std::string derivation;  // individual rows only
  metrics::MetricsReport metrics;
};

/// One row per spec in spec order, then one row per matrix in input order.
std::vector<ReportRow> ensemble_report(const std::vector<EnsembleSpec>& specs,
                                       const std::vector<fusion::ScoreMatrix>& matrices,
                                       const fusion::LabelVector& truth);

std::string render_tsv(const std::vector<ReportRow>& rows);
std::string render_json(const std::vector<ReportRow>& rows);

// Accuracy grid with method/derivation rows and architecture columns.
std::string render_layout(const std::vector<ReportRow>& rows);

}  // namespace salfuse::ensemble
