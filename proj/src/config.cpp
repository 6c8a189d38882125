#include "salfuse/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "salfuse/error.hpp"

namespace salfuse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || value.empty())
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

std::string show(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

void Config::validate() const {
  gbvs.validate();
  spe.validate();
  cos.validate();
  roi.validate();
  split.validate();
  if (augment_multiplier < 0) throw ConfigError("augment.multiplier must be >= 0");
}

void Config::set(const std::string& key, const std::string& value) {
  const auto i = [&] { return parse_number<int>(key, value); };
  const auto d = [&] { return parse_number<double>(key, value); };
  if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "gbvs.work_size") {
    gbvs.work_size = i();
  } else if (key == "gbvs.sigma") {
    if (value == "auto") {
      gbvs.sigma.reset();
    } else {
      gbvs.sigma = d();
    }
  } else if (key == "gbvs.epsilon") {
    gbvs.epsilon = d();
  } else if (key == "gbvs.lambda") {
    gbvs.lambda = d();
  } else if (key == "gbvs.tol") {
    gbvs.tol = d();
  } else if (key == "gbvs.max_iter") {
    gbvs.max_iter = i();
  } else if (key == "spe.work_size") {
    const auto x = value.find('x');
    if (x == std::string::npos) {
      spe.work_height = spe.work_width = i();
    } else {
      spe.work_height = parse_number<int>(key, value.substr(0, x));
      spe.work_width = parse_number<int>(key, value.substr(x + 1));
    }
  } else if (key == "spe.mean_filter_size") {
    spe.mean_filter_size = i();
  } else if (key == "spe.gauss_sigma") {
    spe.gauss_sigma = d();
  } else if (key == "spe.eps_log") {
    spe.eps_log = d();
  } else if (key == "cos.k_single") {
    cos.k_single = i();
  } else if (key == "cos.k_multi") {
    cos.k_multi = i();
  } else if (key == "cos.sigma_s") {
    cos.sigma_s = d();
  } else if (key == "cos.max_iter") {
    cos.max_iter = i();
  } else if (key == "cos.max_side") {
    cos.max_side = i();
  } else if (key == "roi.alpha") {
    roi.alpha = d();
  } else if (key == "roi.rho") {
    roi.rho = d();
  } else if (key == "roi.min_coverage") {
    roi.min_coverage = d();
  } else if (key == "split.train_per_class") {
    split.train_per_class = i();
  } else if (key == "split.repetitions") {
    split.repetitions = i();
  } else if (key == "split.mode") {
    if (value == "random") {
      split.mode = dataset::SplitMode::RandomPerClass;
    } else if (value == "fixed") {
      split.mode = dataset::SplitMode::FixedLists;
    } else {
      throw ConfigError("split.mode must be 'random' or 'fixed', got '" + value + "'");
    }
  } else if (key == "split.train_list") {
    split.train_list = value;
  } else if (key == "split.val_list") {
    split.val_list = value;
  } else if (key == "split.test_list") {
    split.test_list = value;
  } else if (key == "augment.multiplier") {
    augment_multiplier = i();
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  return {
      {"seed", std::to_string(seed)},
      {"gbvs.work_size", std::to_string(gbvs.work_size)},
      {"gbvs.sigma", gbvs.sigma ? show(*gbvs.sigma) : "auto"},
      {"gbvs.epsilon", show(gbvs.epsilon)},
      {"gbvs.lambda", show(gbvs.lambda)},
      {"gbvs.tol", show(gbvs.tol)},
      {"gbvs.max_iter", std::to_string(gbvs.max_iter)},
      {"spe.work_size", std::to_string(spe.work_height) + "x" + std::to_string(spe.work_width)},
      {"spe.mean_filter_size", std::to_string(spe.mean_filter_size)},
      {"spe.gauss_sigma", show(spe.gauss_sigma)},
      {"spe.eps_log", show(spe.eps_log)},
      {"cos.k_single", std::to_string(cos.k_single)},
      {"cos.k_multi", std::to_string(cos.k_multi)},
      {"cos.sigma_s", show(cos.sigma_s)},
      {"cos.max_iter", std::to_string(cos.max_iter)},
      {"cos.max_side", std::to_string(cos.max_side)},
      {"roi.alpha", show(roi.alpha)},
      {"roi.rho", show(roi.rho)},
      {"roi.min_coverage", show(roi.min_coverage)},
      {"split.train_per_class", std::to_string(split.train_per_class)},
      {"split.repetitions", std::to_string(split.repetitions)},
      {"split.mode", split.mode == dataset::SplitMode::RandomPerClass ? "random" : "fixed"},
      {"split.train_list", split.train_list.string()},
      {"split.val_list", split.val_list.string()},
      {"split.test_list", split.test_list.string()},
      {"augment.multiplier", std::to_string(augment_multiplier)},
  };
}

dataset::DeriveOptions Config::derive_options(int jobs) const {
  dataset::DeriveOptions o;
  o.gbvs = gbvs;
  o.spe = spe;
  o.cos = cos;
  o.roi = roi;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      base.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    base.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return base;
}

}  // namespace salfuse
