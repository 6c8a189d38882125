#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "salfuse/dataset.hpp"
#include "salfuse/error.hpp"
#include "salfuse/image_io.hpp"
#include "support.hpp"

using namespace salfuse;
using namespace salfuse::dataset;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<std::string, int>> kSmall = {{"ants", 4}, {"bees", 3}, {"wasps", 5}};

DeriveOptions fast_options() {
  DeriveOptions o;
  o.gbvs.work_size = 12;
  o.seed = 3;
  return o;
}

}  // namespace

TEST_CASE("variant ids") {
  CHECK(all_variants().size() == 10);
  CHECK(all_variants().front() == VariantId{Method::None, Derivation::Original});
  std::set<std::pair<int, int>> seen;
  for (const auto& v : all_variants()) {
    CHECK(v.valid());
    seen.insert({static_cast<int>(v.method), static_cast<int>(v.derivation)});
  }
  CHECK(seen.size() == 10);
  CHECK_FALSE(VariantId{Method::Gbvs, Derivation::Original}.valid());
  CHECK_FALSE(VariantId{Method::None, Derivation::Fg}.valid());
  CHECK(parse_method("SPE") == Method::Spe);
  CHECK(parse_derivation("FG_ROI") == Derivation::FgRoi);
  CHECK_THROWS_AS(parse_method("HOG"), InvalidInput);
}

TEST_CASE("scan the pest-count tree") {
  testing::TempDir dir("scan");
  testing::write_class_tree(dir.path(), testing::pest_class_counts(), 8);
  const DatasetManifest m = scan_dataset(dir.path());
  CHECK(m.records.size() == 563);
  CHECK(m.classes.size() == 10);
  CHECK(std::is_sorted(m.classes.begin(), m.classes.end()));
  std::map<std::string, int> per_class;
  for (const auto& r : m.records) {
    CHECK(r.variant == VariantId{});
    CHECK(r.sample_id == r.path);
    ++per_class[r.label];
  }
  for (const auto& [label, count] : testing::pest_class_counts()) CHECK(per_class[label] == count);

  const DatasetManifest again = scan_dataset(dir.path());
  CHECK(again.records == m.records);
  CHECK(again.classes == m.classes);
}

TEST_CASE("scan errors and warnings") {
  testing::TempDir empty("empty");
  CHECK_THROWS_AS(scan_dataset(empty.path()), InvalidInput);
  CHECK_THROWS_AS(scan_dataset(empty / "missing"), IoError);

  testing::TempDir dir("warn");
  testing::write_class_tree(dir.path(), {{"a", 2}}, 6);
  std::ofstream(dir / "a/broken.png") << "junk";
  std::ofstream(dir / "a/notes.txt") << "hello";
  const DatasetManifest m = scan_dataset(dir.path());
  CHECK(m.records.size() == 2);
  CHECK(m.warnings.size() == 2);

  fs::create_directories(dir / "b");
  CHECK_THROWS_WITH_AS(scan_dataset(dir.path()), doctest::Contains("contains no readable images"), InvalidInput);
}

TEST_CASE("manifest round trip") {
  testing::TempDir dir("manifest");
  testing::write_class_tree(dir / "data", kSmall, 6);
  DatasetManifest m = scan_dataset(dir / "data");
  m.comments = {"created by a test"};
  m.records[1].split = "train";
  m.records[1].repetition = 2;
  write_manifest(dir / "out/m.tsv", m);
  const DatasetManifest back = read_manifest(dir / "out/m.tsv");
  CHECK(back.comments == m.comments);
  CHECK(back.classes == m.classes);
  REQUIRE(back.records.size() == m.records.size());
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    CHECK(back.records[i].sample_id == m.records[i].sample_id);
    CHECK(back.records[i].split == m.records[i].split);
    CHECK(back.records[i].repetition == m.records[i].repetition);
    CHECK(fs::equivalent(back.resolve(back.records[i]), m.resolve(m.records[i])));
  }
  const std::string text = testing::read_bytes(dir / "out/m.tsv");
  CHECK(text.find("sample_id\tpath\tlabel\tmethod\tderivation\tsplit\trepetition\n") != std::string::npos);
}

TEST_CASE("manifest parse errors name the line") {
  testing::TempDir dir("bad");
  std::ofstream(dir / "m.tsv") << "sample_id\tpath\tlabel\tmethod\tderivation\tsplit\trepetition\n"
                               << "a\ta\tx\tNONE\tORIGINAL\t-\t-\n"
                               << "b\tb\tx\tGBVS\tORIGINAL\t-\t-\n";
  CHECK_THROWS_WITH_AS(read_manifest(dir / "m.tsv"), doctest::Contains("m.tsv:3"), ParseError);
}

TEST_CASE("derive writes ten variants per original") {
  testing::TempDir dir("derive");
  testing::write_class_tree(dir / "data", kSmall, 24);
  const DatasetManifest m = scan_dataset(dir / "data");
  const DeriveResult r = derive_datasets(m, fast_options(), dir / "out");
  CHECK(r.failures.empty());
  CHECK(r.manifest.records.size() == 10 * m.records.size());
  std::map<std::string, int> per_variant;
  for (const auto& rec : r.manifest.records) {
    CHECK(fs::exists(r.manifest.resolve(rec)));
    ++per_variant[std::string(to_string(rec.variant.method)) + "/" +
                  std::string(to_string(rec.variant.derivation))];
  }
  CHECK(per_variant.size() == 10);
  for (const auto& [key, count] : per_variant) CHECK(count == static_cast<int>(m.records.size()));

  const auto& rec = m.records.front();
  CHECK(fs::exists(dir / "out/ORIGINAL" / rec.sample_id));
  CHECK(testing::read_bytes(dir / "out/ORIGINAL" / rec.sample_id) == testing::read_bytes(m.resolve(rec)));

  // FG equals the compositional definition.
  const DeriveOptions o = fast_options();
  const RasterImage img = read_image(m.resolve(rec));
  const RasterImage expected = foreground(img, binarize(gbvs::gbvs_saliency(img, o.gbvs), o.roi));
  CHECK(read_image(dir / "out/GBVS/FG" / rec.sample_id) == expected);
}

TEST_CASE("derive output does not depend on the worker count") {
  testing::TempDir dir("jobs");
  testing::write_class_tree(dir / "data", kSmall, 20);
  const DatasetManifest m = scan_dataset(dir / "data");
  DeriveOptions o = fast_options();
  const DeriveResult a = derive_datasets(m, o, dir / "one");
  o.jobs = 3;
  const DeriveResult b = derive_datasets(m, o, dir / "three");
  CHECK(testing::same_tree(dir / "one", dir / "three"));
  REQUIRE(a.manifest.records.size() == b.manifest.records.size());
  for (std::size_t i = 0; i < a.manifest.records.size(); ++i)
    CHECK(a.manifest.records[i].path == b.manifest.records[i].path);
}

TEST_CASE("red disk COS/FG_ROI contains the disk") {
  testing::TempDir dir("disk");
  fs::create_directories(dir / "data/disk");
  write_image(dir / "data/disk/d.png", testing::red_disk_image(64));
  const DatasetManifest m = scan_dataset(dir / "data");
  const DeriveResult r = derive_datasets(m, fast_options(), dir / "out");
  const RasterImage roi_img = read_image(dir / "out/COS/FG_ROI/disk/d.png");
  CHECK(roi_img.height() <= 64);
  CHECK(roi_img.width() <= 64);
  const double radius = std::sqrt(0.10 * 64 * 64 / M_PI);
  CHECK(roi_img.height() >= static_cast<int>(2 * radius) - 1);
  CHECK(roi_img.width() >= static_cast<int>(2 * radius) - 1);
}

TEST_CASE("per-method failures are reported and skipped") {
  testing::TempDir dir("fail");
  testing::write_class_tree(dir / "data", {{"a", 2}}, 10);
  const DatasetManifest m = scan_dataset(dir / "data");
  DeriveOptions o = fast_options();
  o.gbvs.max_iter = 1;
  o.gbvs.tol = 1e-300;
  const DeriveResult r = derive_datasets(m, o, dir / "out");
  CHECK(r.failures.size() == 2);
  for (const auto& f : r.failures) CHECK(f.method == Method::Gbvs);
  CHECK(r.manifest.records.size() == 2 * 10 - 2 * 3);
  write_failures(dir / "out/failures.tsv", r.failures);
  CHECK(testing::read_bytes(dir / "out/failures.tsv").find("GBVS") != std::string::npos);
}

TEST_CASE("split protocol") {
  testing::TempDir dir("split");
  testing::write_class_tree(dir.path(), testing::pest_class_counts(), 4);
  const DatasetManifest m = scan_dataset(dir.path());
  SplitSpec spec;
  spec.seed = 11;
  const auto splits = split(m, spec);
  REQUIRE(splits.size() == 5);
  std::set<std::uint64_t> seeds;
  for (const auto& s : splits) {
    seeds.insert(s.seed);
    std::map<std::string, int> train_per_class, test_per_class;
    std::set<std::string> train(s.train.begin(), s.train.end());
    for (const auto& r : m.records) {
      const bool in_train = train.count(r.sample_id) > 0;
      const bool in_test = std::binary_search(s.test.begin(), s.test.end(), r.sample_id);
      CHECK(in_train != in_test);
      ++(in_train ? train_per_class : test_per_class)[r.label];
    }
    for (const auto& [label, count] : testing::pest_class_counts()) {
      CHECK(train_per_class[label] == 20);
      CHECK(test_per_class[label] == count - 20);
    }
    CHECK(test_per_class["Gypsy_moth_larva"] == 20);
  }
  CHECK(seeds.size() == 5);
  CHECK(splits[0].train != splits[1].train);

  const auto again = split(m, spec);
  for (std::size_t i = 0; i < splits.size(); ++i) CHECK(again[i].train == splits[i].train);

  spec.train_per_class = 40;
  CHECK_THROWS_WITH_AS(split(m, spec), doctest::Contains("Gypsy_moth_larva"), InvalidInput);
}

TEST_CASE("splits propagate to every variant") {
  testing::TempDir dir("coherent");
  testing::write_class_tree(dir / "data", kSmall, 16);
  const DatasetManifest m = scan_dataset(dir / "data");
  const DeriveResult d = derive_datasets(m, fast_options(), dir / "out");
  SplitSpec spec;
  spec.train_per_class = 2;
  spec.repetitions = 3;
  const auto splits = split(d.manifest, spec);
  const DatasetManifest tagged = apply_splits(d.manifest, splits);
  CHECK(tagged.records.size() == 3 * d.manifest.records.size());
  std::map<std::pair<int, std::string>, std::string> original_split;
  for (const auto& r : tagged.records)
    if (r.variant.method == Method::None) original_split[{r.repetition, r.sample_id}] = r.split;
  for (const auto& r : tagged.records) CHECK(r.split == original_split.at({r.repetition, r.sample_id}));
}

TEST_CASE("fixed split lists") {
  testing::TempDir dir("fixed");
  testing::write_class_tree(dir / "data", {{"a", 3}}, 6);
  const DatasetManifest m = scan_dataset(dir / "data");
  std::ofstream(dir / "train.txt") << "a/img_000.png\n";
  std::ofstream(dir / "val.txt") << "a/img_001.png\n";
  std::ofstream(dir / "test.txt") << "a/img_002.png\n";
  SplitSpec spec;
  spec.mode = SplitMode::FixedLists;
  spec.train_list = dir / "train.txt";
  spec.val_list = dir / "val.txt";
  spec.test_list = dir / "test.txt";
  const auto s = split(m, spec);
  REQUIRE(s.size() == 1);
  CHECK(s[0].train == std::vector<std::string>{"a/img_000.png"});
  CHECK(s[0].val == std::vector<std::string>{"a/img_001.png"});

  std::ofstream(dir / "test.txt") << "a/img_009.png\n";
  CHECK_THROWS_WITH_AS(split(m, spec), doctest::Contains("img_009"), InvalidInput);
}

TEST_CASE("materialized training sets") {
  testing::TempDir dir("materialize");
  testing::write_class_tree(dir / "data", kSmall, 12);
  const DatasetManifest m = scan_dataset(dir / "data");
  SplitSpec spec;
  spec.train_per_class = 1;
  spec.repetitions = 2;
  const DatasetManifest tagged = apply_splits(m, split(m, spec));

  MaterializeOptions plain;
  plain.repetition = 1;
  const DatasetManifest flat = materialize_training_set(tagged, plain, dir / "plain");
  CHECK(flat.records.size() == m.records.size());
  for (const auto& r : flat.records)
    CHECK(testing::read_bytes(flat.resolve(r)) == testing::read_bytes(dir / "data" / r.sample_id));
  CHECK(flat.comments.front().find("augmentation=offline multiplier=0") == 0);

  MaterializeOptions aug;
  aug.multiplier = 3;
  aug.seed = 5;
  const DatasetManifest a = materialize_training_set(tagged, aug, dir / "aug1");
  const DatasetManifest b = materialize_training_set(tagged, aug, dir / "aug2");
  CHECK(a.records.size() == m.records.size() + 3 * 3);
  CHECK(testing::same_tree(dir / "aug1", dir / "aug2"));
  int augmented = 0;
  for (const auto& r : a.records) {
    const bool is_aug = r.sample_id.find("#aug") != std::string::npos;
    augmented += is_aug;
    if (is_aug) CHECK(r.split == "train");
  }
  CHECK(augmented == 9);

  MaterializeOptions missing;
  missing.repetition = 7;
  CHECK_THROWS_AS(materialize_training_set(tagged, missing, dir / "none"), InvalidInput);
}
