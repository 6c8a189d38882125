#include "salfuse/ensemble.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "salfuse/error.hpp"

namespace salfuse::ensemble {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool matches(const fusion::ScoreMatrix& m, const std::string& key, const std::string& value) {
  if (key == "id") return m.model_id == value;
  return m.tag(key) == value;
}

}  // namespace

EnsembleSpec parse_spec(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 2 || cols.size() > 3 || cols[0].empty())
    throw ConfigError("ensemble spec '" + line + "' must be name[<TAB>column]<TAB>terms");

  EnsembleSpec spec;
  spec.name = cols[0];
  if (cols.size() == 3) spec.column = cols[1];
  std::istringstream terms(cols.back());
  std::string term;
  while (terms >> term) {
    if (term == "*") {
      spec.all = true;
      continue;
    }
    const bool negate = term.front() == '-';
    const std::string body = negate ? term.substr(1) : term;
    const auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == body.size())
      throw ConfigError("ensemble spec '" + spec.name + "': bad term '" + term + "'");
    const std::string key = body.substr(0, eq);
    const std::string value = body.substr(eq + 1);
    if (negate) {
      spec.exclude.emplace_back(key, value);
    } else if (key == "id") {
      spec.ids.insert(value);
    } else {
      std::istringstream values(value);
      std::string v;
      while (std::getline(values, v, ','))
        if (!v.empty()) spec.require[key].insert(v);
    }
  }
  if (!spec.all && spec.ids.empty() && spec.require.empty())
    throw ConfigError("ensemble spec '" + spec.name + "' selects nothing; use '*', id= or key=value");
  return spec;
}

std::vector<EnsembleSpec> load_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read ensemble specs " + path.string());
  std::vector<EnsembleSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    specs.push_back(parse_spec(line));
  }
  return specs;
}

std::vector<std::size_t> resolve(const EnsembleSpec& spec,
                                 const std::vector<fusion::ScoreMatrix>& matrices) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& m = matrices[i];
    bool candidate = spec.all || spec.ids.count(m.model_id) > 0;
    if (!candidate && !spec.require.empty()) {
      candidate = std::all_of(spec.require.begin(), spec.require.end(), [&](const auto& kv) {
        return kv.first == "id" ? kv.second.count(m.model_id) > 0 : kv.second.count(m.tag(kv.first)) > 0;
      });
    }
    if (!candidate) continue;
    const bool excluded = std::any_of(spec.exclude.begin(), spec.exclude.end(),
                                      [&](const auto& kv) { return matches(m, kv.first, kv.second); });
    if (!excluded) members.push_back(i);
  }
  if (members.empty()) throw ConfigError("ensemble '" + spec.name + "' resolves to no score matrices");
  return members;
}

std::vector<EnsembleSpec> standard_specs(const std::vector<fusion::ScoreMatrix>& matrices) {
  std::vector<std::string> archs;
  for (const auto& m : matrices) {
    const std::string a = m.tag("arch");
    if (!a.empty() && std::find(archs.begin(), archs.end(), a) == archs.end()) archs.push_back(a);
  }
  std::vector<EnsembleSpec> specs;
  for (const auto& a : archs) {
    EnsembleSpec s;
    s.name = "FusionSum";
    s.column = a;
    s.require["arch"] = {a};
    specs.push_back(s);
  }
  for (const auto& a : archs) {
    EnsembleSpec s;
    s.name = "FusionSum\\FG_ROI";
    s.column = a;
    s.require["arch"] = {a};
    s.exclude.emplace_back("derivation", "FG_ROI");
    specs.push_back(s);
  }
  const bool has_dn = std::find(archs.begin(), archs.end(), "DN") != archs.end();
  const auto all_but = [](std::string name, std::vector<std::pair<std::string, std::string>> ex) {
    EnsembleSpec s;
    s.name = std::move(name);
    s.all = true;
    s.exclude = std::move(ex);
    return s;
  };
  if (has_dn) {
    specs.push_back(all_but("AllSum\\DN", {{"arch", "DN"}}));
    specs.push_back(all_but("AllSum\\FG_ROI\\DN", {{"arch", "DN"}, {"derivation", "FG_ROI"}}));
    specs.push_back(all_but("AllSum\\Spectral\\DN", {{"arch", "DN"}, {"method", "SPE"}}));
  }
  specs.push_back(all_but("AllSum\\Spectral", {{"method", "SPE"}}));
  specs.push_back(all_but("AllSum", {}));
  return specs;
}

std::vector<ReportRow> ensemble_report(const std::vector<EnsembleSpec>& specs,
                                       const std::vector<fusion::ScoreMatrix>& matrices,
                                       const fusion::LabelVector& truth) {
  if (matrices.empty()) throw InvalidInput("ensemble report needs at least one score matrix");
  const auto& classes = matrices.front().class_names;
  std::vector<ReportRow> rows;
  for (const auto& spec : specs) {
    std::vector<fusion::ScoreMatrix> members;
    ReportRow row;
    row.name = spec.name;
    row.column = spec.column;
    row.is_ensemble = true;
    for (std::size_t i : resolve(spec, matrices)) {
      members.push_back(matrices[i]);
      row.members.push_back(matrices[i].model_id);
    }
    const fusion::ScoreMatrix fused = fusion::sum_rule(members);
    row.metrics = metrics::evaluate(fusion::predict(fused), truth, classes);
    rows.push_back(std::move(row));
  }
  for (const auto& m : matrices) {
    if (m.class_names != classes)
      throw AlignmentError("score matrix '" + m.model_id + "' has a different class list");
    ReportRow row;
    row.name = m.model_id;
    row.column = m.tag("arch");
    row.members = {m.model_id};
    row.method = m.tag("method");
    row.derivation = m.tag("derivation");
    row.metrics = metrics::evaluate(fusion::predict(m), truth, classes);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_tsv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "name\tcolumn\tkind\tmembers\taccuracy\tweighted_f\tweighted_g\n";
  for (const auto& r : rows) {
    out << r.name << '\t' << (r.column.empty() ? "-" : r.column) << '\t'
        << (r.is_ensemble ? "ensemble" : "model") << '\t' << r.members.size() << '\t'
        << fixed(r.metrics.accuracy, 6) << '\t' << fixed(r.metrics.weighted_f, 6) << '\t'
        << fixed(r.metrics.weighted_g, 6) << "\n";
  }
  return out.str();
}

std::string render_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["column"] = r.column;
    row["kind"] = r.is_ensemble ? "ensemble" : "model";
    row["members"] = r.members;
    if (!r.is_ensemble) {
      row["method"] = r.method;
      row["derivation"] = r.derivation;
    }
    row["accuracy"] = r.metrics.accuracy;
    row["weighted_f"] = r.metrics.weighted_f;
    row["weighted_g"] = r.metrics.weighted_g;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
    for (const auto& c : r.metrics.per_class) {
      per_class.push_back({{"class", c.name},
                           {"support", c.support},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"tpr", c.tpr},
                           {"tnr", c.tnr}});
    }
    row["per_class"] = per_class;
    row["confusion"] = {{"classes", r.metrics.confusion.classes},
                        {"counts", r.metrics.confusion.counts}};
    out.push_back(row);
  }
  return out.dump(2) + "\n";
}

std::string render_layout(const std::vector<ReportRow>& rows) {
  std::vector<std::string> columns;
  for (const auto& r : rows)
    if (!r.column.empty() && std::find(columns.begin(), columns.end(), r.column) == columns.end())
      columns.push_back(r.column);
  if (columns.empty()) columns.push_back("-");

  // (row label, column) -> accuracy cell, in first-seen row order.
  std::vector<std::string> labels;
  std::map<std::pair<std::string, std::string>, std::string> cells;
  const auto put = [&](const std::string& label, const std::string& column, double acc) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    cells[{label, column.empty() ? columns.front() : column}] = fixed(100.0 * acc, 2);
  };

  static const char* kMethods[] = {"COS", "GBVS", "SPE"};
  static const char* kDerivations[] = {"FG", "ROI", "FG_ROI"};
  for (const char* m : kMethods)
    for (const char* d : kDerivations)
      for (const auto& r : rows)
        if (!r.is_ensemble && r.method == m && r.derivation == d)
          put(std::string(m) + "\t" + d, r.column, r.metrics.accuracy);
  for (const auto& r : rows)
    if (!r.is_ensemble && (r.method.empty() || r.method == "NONE"))
      put(r.derivation.empty() || r.derivation == "ORIGINAL" ? "OriginalImage\t" : r.name + "\t",
          r.column, r.metrics.accuracy);
  for (const auto& r : rows)
    if (r.is_ensemble) put(r.name + "\t", r.column, r.metrics.accuracy);

  std::ostringstream out;
  out << "\t";
  for (const auto& c : columns) out << '\t' << c;
  out << "\n";
  for (const auto& label : labels) {
    out << label;
    for (const auto& c : columns) {
      const auto it = cells.find({label, c});
      out << '\t' << (it == cells.end() ? "" : it->second);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace salfuse::ensemble
