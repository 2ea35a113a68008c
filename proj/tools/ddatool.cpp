#include "ddatool.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "dda/align.hpp"
#include "dda/dataset.hpp"
#include "dda/error.hpp"
#include "dda/hash.hpp"
#include "dda/image_io.hpp"
#include "dda/jpeg_parser.hpp"
#include "dda/jpeg_tables.hpp"
#include "dda/metrics.hpp"
#include "dda/spectral.hpp"

namespace dda::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string(".");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Alignment flags shared by `align` and `build`. Enum fields go through
// their string names so --help shows the same spelling the manifest uses.
struct AlignFlags {
  align::AlignConfig config;
  std::string subsampling{jpeg::subsampling_name(config.subsampling)};
  std::string fallback_mode{align::fallback_mode_name(config.freq_fallback_mode)};

  void attach(CLI::App& app) {
    app.add_option("--p-freq", config.p_freq, "probability of matched-quality JPEG compression");
    app.add_option("--p-pixel", config.p_pixel, "probability of pixel mixup");
    app.add_option("--r-pixel", config.r_pixel, "upper bound of the mixup ratio U(0, R)");
    app.add_option("--fallback-qf", config.fallback_qf, "quality used when the real image is not a JPEG");
    app.add_option("--freq-fallback", fallback_mode, "non-JPEG real images: skip | use_fallback_qf")
        ->check(CLI::IsMember({"skip", "use_fallback_qf"}));
    app.add_option("--subsampling", subsampling, "chroma subsampling for compression: 420 | 444")
        ->check(CLI::IsMember({"420", "444", "4:2:0", "4:4:4"}));
    app.add_flag("--emit-compressed", config.emit_compressed_bytes,
                 "persist the encoder bytes (.jpg) when only frequency alignment fired (default: off)");
    app.add_option("--seed", config.seed, "global seed");
  }

  align::AlignConfig resolve() {
    config.subsampling = jpeg::parse_subsampling(subsampling);
    config.freq_fallback_mode = align::parse_fallback_mode(fallback_mode);
    config.validate();
    return config;
  }
};

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p, ec)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && !name.starts_with(".")) found.push_back(entry.path());
      }
      if (ec) throw Error(ErrorCode::kIo, "cannot list " + p.string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p, ec)) {
      files.push_back(p);
    } else {
      throw Error(ErrorCode::kMissingFile, p.string());
    }
  }
  return files;
}

int cmd_estimate_qf(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out) {
  std::ostringstream csv;
  csv << "file,quality,distance,exact\n";
  for (const auto& file : expand_inputs(inputs)) {
    const auto bytes = read_file(file);
    csv << file.generic_string() << ',';
    // Anything opening with SOI is parsed, so a damaged JPEG is an error rather than "none".
    if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8) {
      csv << "none,-,-\n";
      continue;
    }
    const jpeg::QualityEstimate q = jpeg::estimate_quality(jpeg::extract_quant_tables(bytes));
    csv << q.quality << ',' << q.distance << ',' << (q.exact ? "true" : "false") << '\n';
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  return kExitOk;
}

struct AlignArgs {
  std::string real, recon, out, provenance, pair_id;
};

int cmd_align(const AlignArgs& args, AlignFlags& flags, std::ostream& out) {
  const align::AlignConfig config = flags.resolve();
  const auto real_bytes = read_file(args.real);
  const auto recon_bytes = read_file(args.recon);
  const ImageBuffer recon = decode_image(recon_bytes);
  const std::string pair_id = args.pair_id.empty() ? fs::path(args.real).stem().string() : args.pair_id;
  Rng rng(derive_item_seed(config.seed, pair_id));
  const align::AlignedSample sample = align::dda_align_pair(real_bytes, recon, config, rng);

  fs::path out_path(args.out);
  std::vector<std::uint8_t> bytes;
  if (sample.compressed_bytes) {
    out_path.replace_extension(".jpg");
    bytes = *sample.compressed_bytes;
  } else if (!sample.applied_freq && !sample.applied_pixel && is_png(recon_bytes)) {
    bytes = recon_bytes;
  } else {
    bytes = encode_png(sample.image);
  }
  write_file(out_path, bytes);

  fs::path prov_path = args.provenance.empty() ? fs::path(out_path).replace_extension(".json") : fs::path(args.provenance);
  Json j;
  j["pair_id"] = pair_id;
  j["label"] = std::string(align::label_name(sample.label));
  j["source_real"] = args.real;
  j["source_recon"] = args.recon;
  j["output_path"] = out_path.generic_string();
  j["applied_freq"] = sample.applied_freq;
  j["applied_pixel"] = sample.applied_pixel;
  j["qf_used"] = sample.qf_used ? Json(*sample.qf_used) : Json(nullptr);
  j["r_pixel_used"] = sample.r_pixel_used ? Json(*sample.r_pixel_used) : Json(nullptr);
  j["content_hash"] = sha256_hex(bytes);
  j["item_seed"] = derive_item_seed(config.seed, pair_id);
  j["config"] = {{"R_pixel", config.r_pixel},
                 {"p_pixel", config.p_pixel},
                 {"p_freq", config.p_freq},
                 {"fallback_qf", config.fallback_qf},
                 {"freq_fallback_mode", std::string(align::fallback_mode_name(config.freq_fallback_mode))},
                 {"subsampling", std::string(jpeg::subsampling_name(config.subsampling))},
                 {"emit_compressed_bytes", config.emit_compressed_bytes},
                 {"seed", config.seed}};
  j["toolkit_version"] = std::string(kToolkitVersion);
  write_text(prov_path, j.dump(2) + "\n");
  out << out_path.generic_string() << '\n';
  return kExitOk;
}

struct SpectrumArgs {
  std::string image;
  std::string out_dir;
  int block = 8;
  int cell = 32;
  bool linear = false;
  bool per_channel = false;
};

int cmd_spectrum(const SpectrumArgs& args, std::ostream& out) {
  const ImageBuffer image = load_image(args.image);
  const auto mode = args.per_channel ? spectral::ChannelMode::kPerChannel : spectral::ChannelMode::kLuma;
  const spectral::EnergyGrid grid = spectral::block_dct_energy(image, args.block, mode);
  const spectral::EnergyGrid logged = grid.log_view();

  std::ostringstream csv;
  csv << "u,v,energy,log_energy\n";
  for (int u = 0; u < grid.block; ++u) {
    for (int v = 0; v < grid.block; ++v) {
      csv << u << ',' << v << ',' << format_double(grid.at(u, v)) << ',' << format_double(logged.at(u, v)) << '\n';
    }
  }

  // Lighter cells carry more energy.
  const spectral::EnergyGrid& shown = args.linear ? grid : logged;
  const auto [lo, hi] = std::minmax_element(shown.values.begin(), shown.values.end());
  const double span = *hi - *lo;
  const int side = grid.block * args.cell;
  ImageBuffer heat(side, side, 1);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double e = shown.at(y / args.cell, x / args.cell);
      heat.at(y, x, 0) = span > 0 ? 255.0 * (e - *lo) / span : 0.0;
    }
  }

  const fs::path dir(args.out_dir);
  const std::string stem = fs::path(args.image).stem().string();
  const fs::path csv_path = dir / (stem + "_spectrum.csv");
  const fs::path png_path = dir / (stem + "_spectrum.png");
  write_text(csv_path, csv.str());
  save_png(png_path, heat);
  out << csv_path.generic_string() << '\n' << png_path.generic_string() << '\n';
  return kExitOk;
}

std::string keep_suffix(double keep) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_keep%03d", static_cast<int>(std::lround(keep * 100)));
  return buf;
}

int cmd_mask_hf(const std::string& image_path, const std::vector<double>& keeps, const std::string& out_dir,
                std::ostream& out) {
  const ImageBuffer image = load_image(image_path);
  const std::string stem = fs::path(image_path).stem().string();
  out << "keep,mse,file\n";
  for (double keep : keeps) {
    const ImageBuffer masked = spectral::apply_hf_mask_image(image, keep);
    const fs::path path = fs::path(out_dir) / (stem + keep_suffix(keep) + ".png");
    save_png(path, masked);
    out << format_double(keep) << ',' << format_double(metrics::mse(masked, image)) << ',' << path.generic_string()
        << '\n';
  }
  return kExitOk;
}

struct ReportArgs {
  std::string manifest;
  std::string out_dir;
  double cutoff = 0.5;
  bool per_channel = false;
  bool normalize_mse = false;
};

int cmd_report(const ReportArgs& args, std::ostream& out) {
  const fs::path manifest_path(args.manifest);
  const Manifest manifest = read_manifest(manifest_path);
  metrics::ReportOptions options;
  options.cutoff = args.cutoff;
  options.channel_mode = args.per_channel ? spectral::ChannelMode::kPerChannel : spectral::ChannelMode::kLuma;
  options.normalize_mse = args.normalize_mse;
  const metrics::CorpusReport report = metrics::corpus_report(manifest, manifest_path.parent_path(), options);

  fs::path dir = args.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env && *env ? fs::path(env) : manifest_path.parent_path();
  }
  write_text(dir / "report.csv", metrics::report_to_csv(report));
  write_text(dir / "report.json", metrics::report_to_json(report));

  out << "pairs " << report.n_pairs << ", skipped " << report.skipped << ", cutoff " << format_double(report.cutoff)
      << '\n';
  out << "variant,count,mse_mean,mse_median,low_mean,high_mean,high_median\n";
  for (const auto& v : report.variants) {
    out << v.variant << ',' << v.count << ',' << format_double(v.mse.mean) << ',' << format_double(v.mse.median)
        << ',' << format_double(v.low_rel_err.mean) << ',' << format_double(v.high_rel_err.mean) << ','
        << format_double(v.high_rel_err.median) << '\n';
  }
  if (report.fraction_high_improved) {
    out << "freq-aligned high band improved on " << format_double(*report.fraction_high_improved * 100) << "% of pairs\n";
  }
  for (const auto& m : report.skip_messages) out << "skipped " << m << '\n';
  return kExitOk;
}

struct BuildArgs {
  std::string real_dir, recon_dir, out_dir, pairs_csv;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

int cmd_build(const BuildArgs& args, AlignFlags& flags, std::ostream& out, std::ostream& err) {
  dataset::BuildOptions options;
  options.config = flags.resolve();
  options.jobs = std::max(1u, args.jobs);
  const dataset::Pairing pairing = args.pairs_csv.empty()
                                       ? dataset::pair_inputs(args.real_dir, args.recon_dir)
                                       : dataset::pair_inputs_csv(args.real_dir, args.recon_dir, args.pairs_csv);
  for (const auto& p : pairing.unmatched_real) err << "unmatched real " << p.generic_string() << '\n';
  for (const auto& p : pairing.unmatched_recon) err << "unmatched recon " << p.generic_string() << '\n';

  const Manifest manifest = dataset::build_dataset(pairing.pairs, options, args.out_dir);
  std::size_t failed = 0;
  for (const auto& e : manifest.entries) {
    if (e.label == align::Label::kSynthetic && !e.ok()) {
      ++failed;
      err << e.pair_id << ": " << e.status << '\n';
    }
  }
  out << (fs::path(args.out_dir) / "manifest.json").generic_string() << '\n';
  out << "pairs " << pairing.pairs.size() << ", failed " << failed << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& manifest_path, std::ostream& out) {
  const dataset::VerificationReport report = dataset::verify_manifest(manifest_path);
  for (const auto& e : report.entries) {
    if (!e.ok && !e.skipped) out << e.pair_id << ',' << align::label_name(e.label) << ',' << e.message << '\n';
  }
  out << "entries " << report.entries.size() << ", failures " << report.failures() << '\n';
  return report.all_ok() ? kExitOk : kExitValidation;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kOutOfRange:
      return kExitValidation;
    default:
      return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual data alignment toolkit: JPEG quality estimation, frequency/pixel alignment, spectra and reports",
               "ddatool"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 2 input error, 3 validation error, 4 internal error.\n"
             "Output directories default to $" + std::string(kOutputDirEnv) + " when set.");

  std::vector<std::string> qf_inputs;
  std::string qf_out;
  auto* estimate = app.add_subcommand("estimate-qf", "estimate the IJG quality of JPEG files (CSV)");
  estimate->add_option("paths", qf_inputs, "files or directories")->required();
  estimate->add_option("--out", qf_out, "write the CSV here instead of stdout");

  AlignArgs align_args;
  AlignFlags align_flags;
  auto* align_cmd = app.add_subcommand("align", "align one reconstruction to its real image");
  align_cmd->add_option("--real", align_args.real, "real image (JPEG or PNG)")->required();
  align_cmd->add_option("--recon", align_args.recon, "reconstruction (PNG)")->required();
  align_cmd->add_option("--out", align_args.out, "output image path")->required();
  align_cmd->add_option("--provenance", align_args.provenance, "provenance JSON path (default: output path with .json)");
  align_cmd->add_option("--pair-id", align_args.pair_id, "pair id for seed derivation (default: real file stem)");
  align_flags.attach(*align_cmd);

  SpectrumArgs spectrum_args;
  spectrum_args.out_dir = default_output_dir();
  auto* spectrum = app.add_subcommand("spectrum", "block-DCT energy grid as CSV and heatmap PNG");
  spectrum->add_option("image", spectrum_args.image, "input image")->required();
  spectrum->add_option("--block", spectrum_args.block, "block size");
  spectrum->add_option("--cell", spectrum_args.cell, "heatmap pixels per grid cell")->check(CLI::PositiveNumber);
  spectrum->add_flag("--linear", spectrum_args.linear, "linear heatmap scale instead of log(1+e)");
  spectrum->add_flag("--per-channel", spectrum_args.per_channel, "average channels instead of using luma");
  spectrum->add_option("--out-dir", spectrum_args.out_dir, "output directory");

  std::string mask_image;
  std::vector<double> keeps{0.95, 0.90, 0.85, 0.80};
  std::string mask_out = default_output_dir();
  auto* mask = app.add_subcommand("mask-hf", "remove high DCT frequencies beyond each keep fraction");
  mask->add_option("image", mask_image, "input image")->required();
  mask->add_option("--keep", keeps, "keep fractions in (0, 1]");
  mask->add_option("--out-dir", mask_out, "output directory");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "MSE and DFT band errors of a built dataset");
  report->add_option("manifest", report_args.manifest, "manifest.json")->required();
  report->add_option("--cutoff", report_args.cutoff, "normalized radial frequency splitting low and high bands");
  report->add_flag("--per-channel", report_args.per_channel, "pool channels instead of using luma");
  report->add_flag("--normalize-mse", report_args.normalize_mse, "MSE on the [0,1] scale");
  report->add_option("--out-dir", report_args.out_dir, "output directory (default: $" + std::string(kOutputDirEnv) +
                                                           " or the manifest directory)");

  BuildArgs build_args;
  AlignFlags build_flags;
  auto* build = app.add_subcommand("build", "align every stem-matched pair and write a manifest");
  build->add_option("real_dir", build_args.real_dir, "real images")->required();
  build->add_option("recon_dir", build_args.recon_dir, "reconstructions")->required();
  build->add_option("out_dir", build_args.out_dir, "output directory")->required();
  build->add_option("--pairs", build_args.pairs_csv, "CSV with header real,recon for explicit pairing");
  build->add_option("--jobs", build_args.jobs, "worker threads");
  build_flags.attach(*build);

  std::string verify_manifest_path;
  auto* verify = app.add_subcommand("verify", "re-hash a built dataset against its manifest");
  verify->add_option("manifest", verify_manifest_path, "manifest.json")->required();

  std::vector<const char*> argv{"ddatool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*estimate) return cmd_estimate_qf(qf_inputs, qf_out, out);
    if (*align_cmd) return cmd_align(align_args, align_flags, out);
    if (*spectrum) return cmd_spectrum(spectrum_args, out);
    if (*mask) return cmd_mask_hf(mask_image, keeps, mask_out, out);
    if (*report) return cmd_report(report_args, out);
    if (*build) return cmd_build(build_args, build_flags, out, err);
    if (*verify) return cmd_verify(verify_manifest_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dda::cli
