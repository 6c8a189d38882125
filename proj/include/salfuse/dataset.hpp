#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salfuse/cosaliency.hpp"
#include "salfuse/gbvs.hpp"
#include "salfuse/mask_roi.hpp"
#include "salfuse/spectral.hpp"

namespace salfuse::dataset {

enum class Method { None, Gbvs, Cos, Spe };
enum class Derivation { Original, Fg, FgRoi, Roi };

struct VariantId {
  Method method = Method::None;
  Derivation derivation = Derivation::Original;

  bool valid() const;
  friend bool operator==(const VariantId&, const VariantId&) = default;
};

std::string_view to_string(Method m);
std::string_view to_string(Derivation d);
Method parse_method(std::string_view text);
Derivation parse_derivation(std::string_view text);

// ORIGINAL followed by the nine (method, derivation) pairs.
const std::vector<VariantId>& all_variants();
inline constexpr Method kSaliencyMethods[] = {Method::Gbvs, Method::Cos, Method::Spe};

inline constexpr std::string_view kNoSplit = "-";

struct ManifestRecord {
  std::string sample_id;  // relative path of the originating image
  std::string path;       // relative to the manifest's base directory
  std::string label;
  VariantId variant;
  std::string split{kNoSplit};  // train / val / test or "-"
  int repetition = -1;          // -1 when unsplit

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<std::string> classes;  // sorted
  std::vector<ManifestRecord> records;
  std::vector<std::string> comments;  // "# ..." header lines, without the marker
  std::vector<std::string> warnings;  // not serialized

  std::filesystem::path resolve(const ManifestRecord& r) const { return base_dir / r.path; }
  std::vector<const ManifestRecord*> originals() const;
};

/// One ORIGINAL record per decodable image under root/<class>/. Undecodable
/// files are skipped with a warning; an empty root or class is an error.
DatasetManifest scan_dataset(const std::filesystem::path& root);

void write_manifest(const std::filesystem::path& file, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& file);

struct DeriveOptions {
  gbvs::GbvsParams gbvs;
  spectral::SpeParams spe;
  cos::CosParams cos;
  RoiParams roi;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct DeriveFailure {
  std::string sample_id;
  Method method = Method::None;
  std::string message;
};

struct DeriveResult {
  DatasetManifest manifest;
  std::vector<DeriveFailure> failures;
};

// Saliency map of one image with the given method. COS uses `seed`.
GrayMap saliency_map(const RasterImage& img, Method method, const DeriveOptions& options,
                     std::uint64_t seed);

/// Copies each original to out/ORIGINAL/<rel> and writes
/// out/<METHOD>/<DERIVATION>/<rel> for every method and derivation. The
/// returned manifest is rooted at `out` and lists variants in
/// all_variants() order. Output is independent of `options.jobs`.
DeriveResult derive_datasets(const DatasetManifest& manifest, const DeriveOptions& options,
                             const std::filesystem::path& out);

void write_failures(const std::filesystem::path& file, const std::vector<DeriveFailure>& failures);

enum class SplitMode { RandomPerClass, FixedLists };

struct SplitSpec {
  int train_per_class = 20;
  int repetitions = 5;
  std::uint64_t seed = 0;
  SplitMode mode = SplitMode::RandomPerClass;
  // FixedLists only: one relative path (sample id) per line.
  std::filesystem::path train_list;
  std::filesystem::path val_list;
  std::filesystem::path test_list;

  void validate() const;
};

struct Split {
  int repetition = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> train;  // sorted sample ids
  std::vector<std::string> val;
  std::vector<std::string> test;
};

std::uint64_t repetition_seed(std::uint64_t master, int repetition);

/// Per-class partitions of the ORIGINAL sample ids. Throws InvalidInput
/// naming the class when one is too small for train_per_class + 1.
std::vector<Split> split(const DatasetManifest& manifest, const SplitSpec& spec);

// Every record repeated once per split, tagged with its original's membership.
DatasetManifest apply_splits(const DatasetManifest& manifest, const std::vector<Split>& splits);

struct MaterializeOptions {
  int repetition = 0;
  int multiplier = 0;  // augmented copies per training image
  std::uint64_t seed = 0;
};

std::uint64_t augment_seed(std::uint64_t master, std::string_view sample_id, int copy);

/// Writes out/<split>/<METHOD>/<DERIVATION>/<rel> copies of every record in
/// the chosen repetition plus `multiplier` augmented copies of each training
/// image (<stem>_aug<k><ext>). Test and validation images are copied as is.
DatasetManifest materialize_training_set(const DatasetManifest& split_manifest,
                                         const MaterializeOptions& options,
                                         const std::filesystem::path& out);

}  // namespace salfuse::dataset
