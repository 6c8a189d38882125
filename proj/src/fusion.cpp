#include "salfuse/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "salfuse/error.hpp"

namespace salfuse::fusion {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_double(const std::string& token, double& value) {
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string describe_difference(const std::set<std::string>& a, const std::set<std::string>& b,
                                const std::string& a_name, const std::string& b_name) {
  std::vector<std::string> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::ostringstream msg;
  const auto list = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size() && i < 20; ++i) msg << (i ? ", " : "") << v[i];
    if (v.size() > 20) msg << ", ... (" << v.size() << " total)";
  };
  msg << "only in " << a_name << ": [";
  list(only_a);
  msg << "]; only in " << b_name << ": [";
  list(only_b);
  msg << "]";
  return msg.str();
}

}  // namespace

std::string ScoreMatrix::tag(const std::string& key) const {
  const auto it = tags.find(key);
  return it == tags.end() ? std::string() : it->second;
}

ScoreMatrix parse_scores(const std::string& text, const std::string& source,
                         std::vector<std::string>* warnings) {
  ScoreMatrix m;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_classes = false, have_model = false;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (!have_classes) {
      if (cols[0] != "#classes" || cols.size() < 2)
        throw ParseError(source, line_no, "expected '#classes<TAB>name1<TAB>...' header");
      m.class_names.assign(cols.begin() + 1, cols.end());
      std::set<std::string> unique(m.class_names.begin(), m.class_names.end());
      if (unique.size() != m.class_names.size())
        throw ParseError(source, line_no, "duplicate class name in header");
      have_classes = true;
      continue;
    }
    if (!have_model) {
      if (cols[0] != "#model" || cols.size() < 2 || cols.size() > 3 || cols[1].empty())
        throw ParseError(source, line_no, "expected '#model<TAB>model_id<TAB>tags' header");
      m.model_id = cols[1];
      if (cols.size() == 3 && !cols[2].empty()) {
        std::istringstream tags(cols[2]);
        std::string kv;
        while (std::getline(tags, kv, ';')) {
          if (kv.empty()) continue;
          const auto eq = kv.find('=');
          if (eq == std::string::npos || eq == 0)
            throw ParseError(source, line_no, "model tag '" + kv + "' is not key=value");
          m.tags[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
      }
      have_model = true;
      continue;
    }
    if (cols.size() != m.class_names.size() + 1) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(m.class_names.size()) + " scores, got " +
                           std::to_string(cols.size() - 1));
    }
    if (cols[0].empty()) throw ParseError(source, line_no, "empty sample id");
    if (!seen.insert(cols[0]).second)
      throw ParseError(source, line_no, "duplicate sample id '" + cols[0] + "'");
    double row_sum = 0.0;
    for (std::size_t c = 1; c < cols.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cols[c], v) || !std::isfinite(v))
        throw ParseError(source, line_no, "non-numeric score '" + cols[c] + "'");
      m.scores.push_back(v);
      row_sum += v;
    }
    m.sample_ids.push_back(cols[0]);
    if (warnings && std::fabs(row_sum - 1.0) > 0.01) {
      warnings->push_back(source + ":" + std::to_string(line_no) + ": scores for '" + cols[0] +
                          "' sum to " + format_double(row_sum) + ", not 1");
    }
  }
  if (!have_classes) throw ParseError(source, line_no, "missing #classes header");
  if (!have_model) throw ParseError(source, line_no, "missing #model header");
  return m;
}

ScoreMatrix load_scores(const fs::path& path, std::vector<std::string>* warnings) {
  return parse_scores(read_file(path), path.string(), warnings);
}

std::string format_scores(const ScoreMatrix& m) {
  std::ostringstream out;
  out << "#classes";
  for (const auto& c : m.class_names) out << '\t' << c;
  out << "\n#model\t" << m.model_id << '\t';
  bool first = true;
  for (const auto& [k, v] : m.tags) {
    out << (first ? "" : ";") << k << '=' << v;
    first = false;
  }
  out << "\n";
  for (std::size_t s = 0; s < m.samples(); ++s) {
    out << m.sample_ids[s];
    for (std::size_t c = 0; c < m.classes(); ++c) out << '\t' << format_double(m.at(s, c));
    out << "\n";
  }
  return out.str();
}

void write_scores(const fs::path& path, const ScoreMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_scores(m);
}

LabelVector load_truth(const fs::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  LabelVector truth;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw ParseError(path.string(), line_no, "expected 'sample_id<TAB>label'");
    if (!seen.insert(cols[0]).second)
      throw ParseError(path.string(), line_no, "duplicate sample id '" + cols[0] + "'");
    truth.sample_ids.push_back(cols[0]);
    truth.labels.push_back(cols[1]);
  }
  return truth;
}

void write_labels(const fs::path& path, const LabelVector& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << labels.sample_ids[i] << '\t' << labels.labels[i] << "\n";
}

ScoreMatrix sum_rule(const std::vector<ScoreMatrix>& matrices) {
  if (matrices.empty()) throw InvalidInput("sum rule needs at least one score matrix");

  std::vector<const ScoreMatrix*> members;
  for (const auto& m : matrices) members.push_back(&m);
  std::stable_sort(members.begin(), members.end(), [](const ScoreMatrix* a, const ScoreMatrix* b) {
    if (a->model_id != b->model_id) return a->model_id < b->model_id;
    return a->scores < b->scores;
  });

  const ScoreMatrix& ref = *members.front();
  const std::set<std::string> ref_ids(ref.sample_ids.begin(), ref.sample_ids.end());
  for (const auto* m : members) {
    if (m->class_names != ref.class_names) {
      std::set<std::string> a(ref.class_names.begin(), ref.class_names.end());
      std::set<std::string> b(m->class_names.begin(), m->class_names.end());
      throw AlignmentError("class lists of '" + ref.model_id + "' and '" + m->model_id +
                           "' differ: " + describe_difference(a, b, ref.model_id, m->model_id));
    }
    const std::set<std::string> ids(m->sample_ids.begin(), m->sample_ids.end());
    if (ids != ref_ids) {
      throw AlignmentError("sample ids of '" + ref.model_id + "' and '" + m->model_id +
                           "' differ: " + describe_difference(ref_ids, ids, ref.model_id, m->model_id));
    }
  }

  ScoreMatrix fused;
  fused.class_names = ref.class_names;
  fused.sample_ids.assign(ref_ids.begin(), ref_ids.end());
  fused.scores.assign(fused.samples() * fused.classes(), 0.0);
  fused.tags = ref.tags;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const ScoreMatrix& m = *members[i];
    fused.model_id += (i ? "+" : "") + m.model_id;
    for (auto it = fused.tags.begin(); it != fused.tags.end();) {
      if (m.tag(it->first) != it->second) {
        it = fused.tags.erase(it);
      } else {
        ++it;
      }
    }
    std::vector<std::size_t> order(m.samples());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.sample_ids[a] < m.sample_ids[b]; });
    for (std::size_t s = 0; s < order.size(); ++s)
      for (std::size_t c = 0; c < fused.classes(); ++c) fused.at(s, c) += m.at(order[s], c);
  }
  return fused;
}

LabelVector predict(const ScoreMatrix& m) {
  if (m.classes() == 0) throw InvalidInput("cannot predict with zero classes");
  LabelVector out;
  out.sample_ids = m.sample_ids;
  out.labels.reserve(m.samples());
  for (std::size_t s = 0; s < m.samples(); ++s) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < m.classes(); ++c)
      if (m.at(s, c) > m.at(s, best)) best = c;
    out.labels.push_back(m.class_names[best]);
  }
  return out;
}

}  // namespace salfuse::fusion
