#include "salfuse/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "salfuse/augment.hpp"
#include "salfuse/error.hpp"
#include "salfuse/image_io.hpp"
#include "salfuse/seeding.hpp"

namespace salfuse::dataset {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kHeader = "sample_id\tpath\tlabel\tmethod\tderivation\tsplit\trepetition";

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

void check_field(const std::string& value, const char* what) {
  if (value.find_first_of("\t\n\r") != std::string::npos)
    throw InvalidInput(std::string("manifest ") + what + " contains a tab or newline: " + value);
}

std::string generic(const fs::path& p) { return p.generic_string(); }

fs::path variant_dir(const VariantId& v) {
  if (v.method == Method::None) return "ORIGINAL";
  return fs::path(std::string(to_string(v.method))) / std::string(to_string(v.derivation));
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void copy_bytes(const fs::path& from, const fs::path& to) {
  ensure_parent(to);
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

std::vector<std::string> read_list(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read split list " + file.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

// Seeded Fisher-Yates; std::shuffle is not portable across libraries.
void shuffle(std::vector<std::string>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

bool VariantId::valid() const {
  return (method == Method::None) == (derivation == Derivation::Original);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::None: return "NONE";
    case Method::Gbvs: return "GBVS";
    case Method::Cos: return "COS";
    case Method::Spe: return "SPE";
  }
  return "NONE";
}

std::string_view to_string(Derivation d) {
  switch (d) {
    case Derivation::Original: return "ORIGINAL";
    case Derivation::Fg: return "FG";
    case Derivation::FgRoi: return "FG_ROI";
    case Derivation::Roi: return "ROI";
  }
  return "ORIGINAL";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::None, Method::Gbvs, Method::Cos, Method::Spe})
    if (text == to_string(m)) return m;
  throw InvalidInput("unknown saliency method '" + std::string(text) + "'");
}

Derivation parse_derivation(std::string_view text) {
  for (Derivation d : {Derivation::Original, Derivation::Fg, Derivation::FgRoi, Derivation::Roi})
    if (text == to_string(d)) return d;
  throw InvalidInput("unknown derivation '" + std::string(text) + "'");
}

const std::vector<VariantId>& all_variants() {
  static const std::vector<VariantId> variants = [] {
    std::vector<VariantId> v{{Method::None, Derivation::Original}};
    for (Method m : kSaliencyMethods)
      for (Derivation d : {Derivation::Fg, Derivation::FgRoi, Derivation::Roi}) v.push_back({m, d});
    return v;
  }();
  return variants;
}

std::vector<const ManifestRecord*> DatasetManifest::originals() const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records)
    if (r.variant.method == Method::None) out.push_back(&r);
  return out;
}

DatasetManifest scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("dataset root " + root.string() + " is not a directory");
  DatasetManifest manifest;
  manifest.base_dir = root;

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw InvalidInput("dataset root " + root.string() + " has no class directories");

  for (const auto& dir : class_dirs) {
    const std::string label = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::size_t kept = 0;
    for (const auto& file : files) {
      const std::string rel = generic(file.lexically_relative(root));
      if (!is_supported_image(file)) {
        manifest.warnings.push_back("skipping " + rel + ": unsupported file type");
        continue;
      }
      try {
        (void)read_image(file);
      } catch (const Error& e) {
        manifest.warnings.push_back("skipping " + rel + ": " + e.what());
        continue;
      }
      check_field(rel, "path");
      manifest.records.push_back({rel, rel, label, {}, std::string(kNoSplit), -1});
      ++kept;
    }
    if (kept == 0) throw InvalidInput("class directory " + dir.string() + " contains no readable images");
    manifest.classes.push_back(label);
  }
  return manifest;
}

void write_manifest(const fs::path& file, const DatasetManifest& manifest) {
  ensure_parent(file);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + file.string());
  const fs::path out_dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  for (const auto& c : manifest.comments) out << "# " << c << "\n";
  out << kHeader << "\n";
  for (const auto& r : manifest.records) {
    check_field(r.sample_id, "sample_id");
    check_field(r.label, "label");
    const fs::path target = manifest.base_dir / r.path;
    const std::string rel = generic(fs::weakly_canonical(target).lexically_relative(
        fs::weakly_canonical(out_dir)));
    out << r.sample_id << '\t' << rel << '\t' << r.label << '\t' << to_string(r.variant.method)
        << '\t' << to_string(r.variant.derivation) << '\t' << r.split << '\t'
        << (r.repetition < 0 ? std::string(kNoSplit) : std::to_string(r.repetition)) << "\n";
  }
  if (!out) throw IoError("failed writing manifest " + file.string());
}

DatasetManifest read_manifest(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read manifest " + file.string());
  DatasetManifest manifest;
  manifest.base_dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  std::set<std::string> classes;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      manifest.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) throw ParseError(file.string(), line_no, "unexpected manifest header");
      header_seen = true;
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != 7)
      throw ParseError(file.string(), line_no, "expected 7 columns, got " + std::to_string(cols.size()));
    ManifestRecord r;
    r.sample_id = cols[0];
    r.path = cols[1];
    r.label = cols[2];
    try {
      r.variant = {parse_method(cols[3]), parse_derivation(cols[4])};
      r.split = cols[5];
      r.repetition = cols[6] == kNoSplit ? -1 : std::stoi(cols[6]);
    } catch (const std::exception& e) {
      throw ParseError(file.string(), line_no, e.what());
    }
    if (!r.variant.valid()) throw ParseError(file.string(), line_no, "invalid method/derivation pair");
    classes.insert(r.label);
    manifest.records.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(file.string(), line_no, "missing manifest header");
  manifest.classes.assign(classes.begin(), classes.end());
  return manifest;
}

GrayMap saliency_map(const RasterImage& img, Method method, const DeriveOptions& options,
                     std::uint64_t seed) {
  switch (method) {
    case Method::Gbvs: return gbvs::gbvs_saliency(img, options.gbvs);
    case Method::Spe: return spectral::spe_saliency(img, options.spe);
    case Method::Cos: {
      cos::CosParams params = options.cos;
      params.seed = seed;
      return cos::cos_saliency(img, params);
    }
    case Method::None: break;
  }
  throw InvalidInput("saliency_map needs a saliency method");
}

DeriveResult derive_datasets(const DatasetManifest& manifest, const DeriveOptions& options,
                             const fs::path& out) {
  options.gbvs.validate();
  options.spe.validate();
  options.cos.validate();
  options.roi.validate();
  const auto originals = manifest.originals();
  if (originals.empty()) throw InvalidInput("manifest has no ORIGINAL records");

  struct ImageOutcome {
    // Indexed by position in all_variants(); empty path = skipped.
    std::vector<std::optional<ManifestRecord>> records;
    std::vector<DeriveFailure> failures;
  };
  std::vector<ImageOutcome> outcomes(originals.size());
  const auto& variants = all_variants();

  const auto process = [&](std::size_t idx) {
    const ManifestRecord& orig = *originals[idx];
    ImageOutcome& result = outcomes[idx];
    result.records.assign(variants.size(), std::nullopt);
    const auto make_record = [&](const VariantId& v) {
      const std::string rel = generic(variant_dir(v) / orig.sample_id);
      return ManifestRecord{orig.sample_id, rel, orig.label, v, std::string(kNoSplit), -1};
    };

    RasterImage img;
    try {
      img = read_image(manifest.resolve(orig));
      ManifestRecord rec = make_record(variants[0]);
      copy_bytes(manifest.resolve(orig), out / rec.path);
      result.records[0] = std::move(rec);
    } catch (const Error& e) {
      result.failures.push_back({orig.sample_id, Method::None, e.what()});
      return;
    }

    for (std::size_t m = 0; m < std::size(kSaliencyMethods); ++m) {
      const Method method = kSaliencyMethods[m];
      try {
        const std::uint64_t seed = derive_seed(options.seed, "cos/" + orig.sample_id);
        const GrayMap sal = saliency_map(img, method, options, seed);
        const BinaryMask mask = binarize(sal, options.roi);
        const RasterImage fg = foreground(img, mask);
        const BoundingBox box = mask_bounds(mask, options.roi.rho);
        const RasterImage images[] = {fg, crop(img, box), crop(fg, box)};
        for (std::size_t d = 0; d < 3; ++d) {
          const std::size_t slot = 1 + m * 3 + d;
          ManifestRecord rec = make_record(variants[slot]);
          const fs::path target = out / rec.path;
          ensure_parent(target);
          write_image(target, images[d]);
          result.records[slot] = std::move(rec);
        }
      } catch (const Error& e) {
        for (std::size_t d = 0; d < 3; ++d) result.records[1 + m * 3 + d].reset();
        result.failures.push_back({orig.sample_id, method, e.what()});
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < originals.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < originals.size(); i = next++) process(i);
      });
    }
    for (auto& w : workers) w.join();
  }

  DeriveResult result;
  result.manifest.base_dir = out;
  result.manifest.classes = manifest.classes;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (const auto& o : outcomes)
      if (o.records[v]) result.manifest.records.push_back(*o.records[v]);
  for (const auto& o : outcomes)
    result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
  return result;
}

void write_failures(const fs::path& file, const std::vector<DeriveFailure>& failures) {
  ensure_parent(file);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write failures report " + file.string());
  out << "sample_id\tmethod\tmessage\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << f.sample_id << '\t' << to_string(f.method) << '\t' << msg << "\n";
  }
}

void SplitSpec::validate() const {
  if (train_per_class < 1) throw ConfigError("split.train_per_class must be >= 1");
  if (repetitions < 1) throw ConfigError("split.repetitions must be >= 1");
  if (mode == SplitMode::FixedLists && (train_list.empty() || test_list.empty()))
    throw ConfigError("fixed-list splits need train and test list files");
}

std::uint64_t repetition_seed(std::uint64_t master, int repetition) {
  return derive_seed(master, "split/" + std::to_string(repetition));
}

std::vector<Split> split(const DatasetManifest& manifest, const SplitSpec& spec) {
  spec.validate();
  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto* r : manifest.originals()) by_class[r->label].push_back(r->sample_id);
  if (by_class.empty()) throw InvalidInput("manifest has no ORIGINAL records to split");

  if (spec.mode == SplitMode::FixedLists) {
    std::set<std::string> known;
    for (const auto& [label, ids] : by_class) known.insert(ids.begin(), ids.end());
    Split s;
    s.seed = spec.seed;
    std::set<std::string> seen;
    const auto take = [&](const fs::path& list, std::vector<std::string>& dest) {
      if (list.empty()) return;
      for (auto& id : read_list(list)) {
        if (!known.count(id)) throw InvalidInput(list.string() + " lists unknown sample '" + id + "'");
        if (!seen.insert(id).second) throw InvalidInput("sample '" + id + "' appears in more than one split list");
        dest.push_back(std::move(id));
      }
    };
    take(spec.train_list, s.train);
    take(spec.val_list, s.val);
    take(spec.test_list, s.test);
    for (const auto& id : known)
      if (!seen.count(id)) throw InvalidInput("sample '" + id + "' is missing from the split lists");
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return {s};
  }

  for (const auto& [label, ids] : by_class) {
    if (ids.size() < static_cast<std::size_t>(spec.train_per_class) + 1) {
      throw InvalidInput("class '" + label + "' has " + std::to_string(ids.size()) +
                         " images; need at least " + std::to_string(spec.train_per_class + 1));
    }
  }

  std::vector<Split> splits;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    Split s;
    s.repetition = rep;
    s.seed = repetition_seed(spec.seed, rep);
    for (const auto& [label, ids] : by_class) {
      std::vector<std::string> order = ids;
      std::sort(order.begin(), order.end());
      Rng rng(derive_seed(s.seed, "class/" + label));
      shuffle(order, rng);
      const auto cut = order.begin() + spec.train_per_class;
      s.train.insert(s.train.end(), order.begin(), cut);
      s.test.insert(s.test.end(), cut, order.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

DatasetManifest apply_splits(const DatasetManifest& manifest, const std::vector<Split>& splits) {
  DatasetManifest out;
  out.base_dir = manifest.base_dir;
  out.classes = manifest.classes;
  out.comments = manifest.comments;
  for (const auto& s : splits) {
    std::map<std::string_view, std::string_view> membership;
    for (const auto& id : s.train) membership[id] = "train";
    for (const auto& id : s.val) membership[id] = "val";
    for (const auto& id : s.test) membership[id] = "test";
    for (const auto& r : manifest.records) {
      const auto it = membership.find(r.sample_id);
      if (it == membership.end()) continue;
      ManifestRecord rec = r;
      rec.split = std::string(it->second);
      rec.repetition = s.repetition;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

std::uint64_t augment_seed(std::uint64_t master, std::string_view sample_id, int copy) {
  return derive_seed(master, "augment/" + std::string(sample_id) + "#" + std::to_string(copy));
}

DatasetManifest materialize_training_set(const DatasetManifest& split_manifest,
                                         const MaterializeOptions& options, const fs::path& out) {
  if (options.multiplier < 0) throw ConfigError("augment.multiplier must be >= 0");
  DatasetManifest result;
  result.base_dir = out;
  result.classes = split_manifest.classes;
  result.comments.push_back("augmentation=offline multiplier=" + std::to_string(options.multiplier) +
                            " seed=" + std::to_string(options.seed) +
                            " repetition=" + std::to_string(options.repetition));
  bool any = false;
  for (const auto& r : split_manifest.records) {
    if (r.repetition != options.repetition || r.split == kNoSplit) continue;
    any = true;
    const fs::path rel = fs::path(r.split) / variant_dir(r.variant) / r.sample_id;
    copy_bytes(split_manifest.resolve(r), out / rel);
    ManifestRecord copy = r;
    copy.path = generic(rel);
    result.records.push_back(copy);
    if (r.split != "train" || options.multiplier == 0) continue;

    const RasterImage img = read_image(split_manifest.resolve(r));
    for (int k = 1; k <= options.multiplier; ++k) {
      const augment::AugmentSpec spec = augment::sample_spec(augment_seed(options.seed, r.sample_id, k));
      fs::path aug_rel = rel;
      aug_rel.replace_filename(rel.stem().string() + "_aug" + std::to_string(k) + rel.extension().string());
      ensure_parent(out / aug_rel);
      write_image(out / aug_rel, augment::apply(img, spec));
      ManifestRecord aug = r;
      aug.sample_id = r.sample_id + "#aug" + std::to_string(k);
      aug.path = generic(aug_rel);
      result.records.push_back(std::move(aug));
    }
  }
  if (!any) {
    throw InvalidInput("split manifest has no records for repetition " +
                       std::to_string(options.repetition));
  }
  return result;
}

}  // namespace salfuse::dataset
