#include "salfuse/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "salfuse/augment.hpp"
#include "salfuse/config.hpp"
#include "salfuse/dataset.hpp"
#include "salfuse/ensemble.hpp"
#include "salfuse/error.hpp"
#include "salfuse/fusion.hpp"
#include "salfuse/image_io.hpp"
#include "salfuse/mask_roi.hpp"
#include "salfuse/metrics.hpp"

namespace salfuse::cli {

namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand plus the config keys a subcommand
// exposes directly. Precedence: defaults < --config < --set < direct flags.
struct CommonFlags {
  std::string config_file;
  std::string seed;
  std::vector<std::string> sets;
  std::vector<std::pair<CLI::Option*, std::string>> direct;  // option -> config key
  std::map<std::string, std::string> direct_values;
};

std::string config_footer() {
  std::ostringstream s;
  s << "Config keys (--config FILE with 'key = value' lines, or --set key=value):\n";
  for (const auto& [k, v] : Config{}.entries())
    s << "  " << std::left << std::setw(24) << k << (v.empty() ? "(unset)" : v) << "\n";
  return s.str();
}

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_file, "Config file of 'key = value' lines");
  sub->add_option("--seed", flags.seed, "Master seed for every random choice")
      ->default_str(Config{}.entries().front().second);
  sub->add_option("--set", flags.sets, "Override one config key, KEY=VALUE (repeatable)")->default_str("");
  sub->footer(config_footer());
}

void add_direct(CLI::App* sub, CommonFlags& flags, const std::string& name, const std::string& key,
                const std::string& help) {
  std::string def;
  for (const auto& [k, v] : Config{}.entries())
    if (k == key) def = v;
  auto* opt = sub->add_option(name, flags.direct_values[key], help + " (" + key + ")");
  opt->default_str(def);
  flags.direct.emplace_back(opt, key);
}

Config resolve_config(const CommonFlags& flags) {
  Config cfg = flags.config_file.empty() ? Config{} : load_config(flags.config_file);
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [opt, key] : flags.direct)
    if (opt->count() > 0) cfg.set(key, flags.direct_values.at(key));
  if (!flags.seed.empty()) cfg.set("seed", flags.seed);
  cfg.validate();
  return cfg;
}

dataset::Method parse_cli_method(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), ::toupper);
  for (dataset::Method m : {dataset::Method::Gbvs, dataset::Method::Spe, dataset::Method::Cos})
    if (text == dataset::to_string(m)) return m;
  throw ConfigError("--method must be gbvs, spe or cos, got '" + text + "'");
}

void log_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

void print_metrics(std::ostream& out, const std::string& name, const metrics::MetricsReport& r) {
  out << "model\t" << name << "\n"
      << "accuracy\t" << std::fixed << std::setprecision(6) << r.accuracy << "\n"
      << "weighted_f\t" << r.weighted_f << "\n"
      << "weighted_g\t" << r.weighted_g << "\n"
      << "class\tsupport\tprecision\trecall\tf1\ttpr\ttnr\n";
  for (const auto& c : r.per_class) {
    out << c.name << '\t' << c.support << '\t' << c.precision << '\t' << c.recall << '\t' << c.f1
        << '\t' << c.tpr << '\t' << c.tnr << "\n";
  }
  out.unsetf(std::ios::floatfield);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

std::vector<fusion::ScoreMatrix> load_all(const std::vector<std::string>& paths, std::ostream& err) {
  std::vector<fusion::ScoreMatrix> out;
  for (const auto& p : paths) {
    std::vector<std::string> warnings;
    out.push_back(fusion::load_scores(p, &warnings));
    log_warnings(err, warnings);
  }
  return out;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Convergence: return kExitNoConvergence;
    case ErrorKind::Config: return kExitUsage;
    default: return kExitData;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saliency-derived datasets and sum-rule ensemble evaluation", "salfuse"};
  app.require_subcommand(1);
  CommonFlags flags;

  // saliency
  auto* sal = app.add_subcommand("saliency", "Compute saliency maps (PGM/PNG)");
  std::string sal_method;
  std::vector<std::string> sal_in, sal_out;
  sal->add_option("--method", sal_method, "gbvs, spe or cos")->required();
  sal->add_option("--in", sal_in, "Input image(s); several with cos run co-saliency")->required();
  sal->add_option("--out", sal_out, "Output map path(s), one per input")->required();
  add_common(sal, flags);

  // mask
  auto* msk = app.add_subcommand("mask", "Binary mask plus FG, FG-ROI and ROI images");
  std::string mask_method, mask_in, mask_out, fg_out, fg_roi_out, roi_out;
  msk->add_option("--method", mask_method, "gbvs, spe or cos")->required();
  msk->add_option("--in", mask_in, "Input image")->required();
  msk->add_option("--mask", mask_out, "Mask output (0/255)");
  msk->add_option("--fg", fg_out, "Foreground image output");
  msk->add_option("--fg-roi", fg_roi_out, "Original cropped to the mask support");
  msk->add_option("--roi", roi_out, "Foreground cropped to the mask support");
  add_common(msk, flags);

  // derive
  auto* drv = app.add_subcommand("derive", "Materialize the original plus 9 saliency-derived datasets");
  std::string derive_in, derive_out;
  int jobs = 1;
  drv->add_option("--in", derive_in, "Dataset root, one subdirectory per class")->required();
  drv->add_option("--out", derive_out, "Output directory")->required();
  drv->add_option("--jobs", jobs, "Worker threads; output does not depend on it")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(drv, flags);

  // split
  auto* spl = app.add_subcommand("split", "Per-class train/test splits, propagated to all variants");
  std::string split_manifest, split_out;
  spl->add_option("--manifest", split_manifest, "Manifest written by derive")->required();
  spl->add_option("--out", split_out, "Split manifest output")->required();
  add_direct(spl, flags, "--train-per-class", "split.train_per_class", "Training images per class");
  add_direct(spl, flags, "--repetitions", "split.repetitions", "Number of random splits");
  add_direct(spl, flags, "--mode", "split.mode", "random or fixed");
  add_direct(spl, flags, "--train-list", "split.train_list", "Fixed mode: training list");
  add_direct(spl, flags, "--val-list", "split.val_list", "Fixed mode: validation list");
  add_direct(spl, flags, "--test-list", "split.test_list", "Fixed mode: test list");
  add_common(spl, flags);

  // augment
  auto* aug = app.add_subcommand("augment", "Augment one image, or materialize a training set");
  std::string aug_in, aug_out, aug_manifest;
  int aug_rep = 0;
  aug->add_option("--in", aug_in, "Single image to augment");
  aug->add_option("--out", aug_out, "Output image, or output directory with --manifest")->required();
  aug->add_option("--manifest", aug_manifest, "Split manifest to materialize");
  aug->add_option("--repetition", aug_rep, "Split repetition to materialize")->capture_default_str();
  add_direct(aug, flags, "--multiplier", "augment.multiplier", "Augmented copies per training image");
  add_common(aug, flags);

  // fuse
  auto* fus = app.add_subcommand("fuse", "Sum-rule fusion of score files");
  std::vector<std::string> fuse_scores;
  std::string fuse_truth, fuse_out;
  fus->add_option("--scores", fuse_scores, "Score files")->required();
  fus->add_option("--truth", fuse_truth, "Truth file; prints metrics of the fused matrix");
  fus->add_option("--out", fuse_out, "Fused score file");
  add_common(fus, flags);

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "Accuracy, weighted F-score and G-mean of one score file");
  std::string eval_scores, eval_truth, eval_json;
  evl->add_option("--scores", eval_scores, "Score file")->required();
  evl->add_option("--truth", eval_truth, "Truth file")->required();
  evl->add_option("--json", eval_json, "Machine-readable report output");
  add_common(evl, flags);

  // report
  auto* rep = app.add_subcommand("report", "Ensemble table over many score files");
  std::vector<std::string> rep_scores;
  std::string rep_truth, rep_specs, rep_out, rep_json, rep_layout;
  rep->add_option("--scores", rep_scores, "Score files")->required();
  rep->add_option("--truth", rep_truth, "Truth file")->required();
  rep->add_option("--ensembles", rep_specs, "Ensemble spec file (default: FusionSum/AllSum family)");
  rep->add_option("--out", rep_out, "TSV report (default: standard output)");
  rep->add_option("--json", rep_json, "Machine-readable report output");
  rep->add_option("--layout", rep_layout, "Accuracy grid, method/derivation by architecture");
  add_common(rep, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Config cfg = resolve_config(flags);

    if (sal->parsed()) {
      if (sal_in.size() != sal_out.size()) throw ConfigError("--in and --out counts differ");
      const dataset::Method method = parse_cli_method(sal_method);
      const auto options = cfg.derive_options(1);
      if (method == dataset::Method::Cos && sal_in.size() > 1) {
        std::vector<RasterImage> imgs;
        for (const auto& p : sal_in) imgs.push_back(read_image(p));
        cos::CosParams params = cfg.cos;
        params.seed = cfg.seed;
        const auto maps = cos::cos_saliency(imgs, params);
        for (std::size_t i = 0; i < maps.size(); ++i) write_map(sal_out[i], maps[i]);
      } else {
        for (std::size_t i = 0; i < sal_in.size(); ++i)
          write_map(sal_out[i], dataset::saliency_map(read_image(sal_in[i]), method, options, cfg.seed));
      }
      return kExitOk;
    }

    if (msk->parsed()) {
      if (mask_out.empty() && fg_out.empty() && fg_roi_out.empty() && roi_out.empty())
        throw ConfigError("mask: give at least one of --mask, --fg, --fg-roi, --roi");
      const RasterImage img = read_image(mask_in);
      const GrayMap s =
          dataset::saliency_map(img, parse_cli_method(mask_method), cfg.derive_options(1), cfg.seed);
      const BinaryMask mask = binarize(s, cfg.roi);
      if (!mask_out.empty()) write_image(mask_out, mask_to_image(mask));
      if (!fg_out.empty()) write_image(fg_out, foreground(img, mask));
      if (!fg_roi_out.empty()) write_image(fg_roi_out, fg_roi(img, mask, cfg.roi));
      if (!roi_out.empty()) write_image(roi_out, roi(img, mask, cfg.roi));
      return kExitOk;
    }

    if (drv->parsed()) {
      dataset::DatasetManifest scanned = dataset::scan_dataset(derive_in);
      log_warnings(err, scanned.warnings);
      const auto result = dataset::derive_datasets(scanned, cfg.derive_options(jobs), derive_out);
      dataset::write_manifest(fs::path(derive_out) / "manifest.tsv", result.manifest);
      dataset::write_failures(fs::path(derive_out) / "failures.tsv", result.failures);
      for (const auto& f : result.failures)
        err << "warning: " << f.sample_id << " [" << dataset::to_string(f.method) << "]: " << f.message << "\n";
      err << "derived " << result.manifest.records.size() << " records from "
          << scanned.originals().size() << " images (" << result.failures.size() << " failures)\n";
      return kExitOk;
    }

    if (spl->parsed()) {
      const auto manifest = dataset::read_manifest(split_manifest);
      const auto splits = dataset::split(manifest, cfg.split);
      dataset::DatasetManifest out_manifest = dataset::apply_splits(manifest, splits);
      out_manifest.comments.push_back("split seed=" + std::to_string(cfg.seed) + " repetitions=" +
                                      std::to_string(splits.size()));
      dataset::write_manifest(split_out, out_manifest);
      return kExitOk;
    }

    if (aug->parsed()) {
      if (!aug_manifest.empty()) {
        const auto manifest = dataset::read_manifest(aug_manifest);
        dataset::MaterializeOptions o{aug_rep, cfg.augment_multiplier, cfg.seed};
        const auto result = dataset::materialize_training_set(manifest, o, aug_out);
        dataset::write_manifest(fs::path(aug_out) / "manifest.tsv", result);
        return kExitOk;
      }
      if (aug_in.empty()) throw ConfigError("augment: give --in IMAGE or --manifest FILE");
      const augment::AugmentSpec spec = augment::sample_spec(cfg.seed);
      write_image(aug_out, augment::apply(read_image(aug_in), spec));
      return kExitOk;
    }

    if (fus->parsed()) {
      const auto matrices = load_all(fuse_scores, err);
      const fusion::ScoreMatrix fused = fusion::sum_rule(matrices);
      if (!fuse_out.empty()) write_scores(fuse_out, fused);
      if (!fuse_truth.empty()) {
        const auto truth = fusion::load_truth(fuse_truth);
        print_metrics(out, fused.model_id,
                      metrics::evaluate(fusion::predict(fused), truth, fused.class_names));
      }
      return kExitOk;
    }

    if (evl->parsed()) {
      const auto matrices = load_all({eval_scores}, err);
      const auto truth = fusion::load_truth(eval_truth);
      const auto& m = matrices.front();
      const auto report = metrics::evaluate(fusion::predict(m), truth, m.class_names);
      print_metrics(out, m.model_id, report);
      if (!eval_json.empty()) {
        ensemble::ReportRow row{m.model_id, m.tag("arch"), false, {m.model_id},
                                m.tag("method"), m.tag("derivation"), report};
        write_text(eval_json, ensemble::render_json({row}));
      }
      return kExitOk;
    }

    if (rep->parsed()) {
      const auto matrices = load_all(rep_scores, err);
      const auto truth = fusion::load_truth(rep_truth);
      const auto specs = rep_specs.empty() ? ensemble::standard_specs(matrices) : ensemble::load_specs(rep_specs);
      const auto rows = ensemble::ensemble_report(specs, matrices, truth);
      const std::string tsv = ensemble::render_tsv(rows);
      if (rep_out.empty()) {
        out << tsv;
      } else {
        write_text(rep_out, tsv);
      }
      if (!rep_json.empty()) write_text(rep_json, ensemble::render_json(rows));
      if (!rep_layout.empty()) write_text(rep_layout, ensemble::render_layout(rows));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace salfuse::cli
