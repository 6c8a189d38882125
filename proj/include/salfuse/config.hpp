#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "salfuse/cosaliency.hpp"
#include "salfuse/dataset.hpp"
#include "salfuse/gbvs.hpp"
#include "salfuse/mask_roi.hpp"
#include "salfuse/spectral.hpp"

namespace salfuse {

// Every tunable of the pipeline under namespaced `section.key` names.
struct Config {
  gbvs::GbvsParams gbvs;
  spectral::SpeParams spe;
  cos::CosParams cos;
  RoiParams roi;
  dataset::SplitSpec split;
  int augment_multiplier = 0;
  std::uint64_t seed = 0;

  void validate() const;

  // Applies one `key = value` assignment; unknown keys are rejected.
  void set(const std::string& key, const std::string& value);

  // Current value of every key, in documentation order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  dataset::DeriveOptions derive_options(int jobs) const;
};

/// Reads `key = value` lines ('#' starts a comment) over the defaults.
/// Throws ConfigError naming the file, line and key on any bad entry.
Config load_config(const std::filesystem::path& path, Config base = {});

}  // namespace salfuse
