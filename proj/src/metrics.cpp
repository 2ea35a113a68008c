#include "dda/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "dda/align.hpp"
#include "dda/error.hpp"
#include "dda/image_io.hpp"
#include "dda/jpeg_parser.hpp"

namespace dda::metrics {

namespace fs = std::filesystem;

namespace {

void check_options(const ReportOptions& options) {
  if (!(options.cutoff > 0.0 && options.cutoff < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "cutoff must lie in (0, 1)");
  }
  if (options.block < 1) throw Error(ErrorCode::kOutOfRange, "block must be positive");
}

}  // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, "mse inputs differ in shape");
  auto x = a.samples();
  auto y = b.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

std::vector<PairReport> pair_report(const std::string& pair_id, const ImageBuffer& real,
                                    std::span<const LabeledImage> variants, const ReportOptions& options,
                                    std::optional<jpeg::QualityEstimate> qf_estimate) {
  check_options(options);
  std::vector<PairReport> reports;
  if (variants.empty()) return reports;
  const spectral::EnergyGrid real_grid = spectral::block_dct_energy(real, options.block, options.channel_mode);
  for (const auto& variant : variants) {
    if (!variant.image.same_shape(real)) {
      throw Error(ErrorCode::kShapeMismatch, "variant '" + variant.label + "' differs in shape from the real image");
    }
    PairReport r;
    r.pair_id = pair_id;
    r.variant = variant.label;
    r.mse = mse(real, variant.image);
    if (options.normalize_mse) r.mse /= 255.0 * 255.0;
    const auto band = spectral::band_relative_error(real, variant.image, options.cutoff, options.channel_mode);
    r.low_rel_err = band.low_rel_err;
    r.high_rel_err = band.high_rel_err;
    r.hf_grid_real = real_grid;
    r.hf_grid_syn = spectral::block_dct_energy(variant.image, options.block, options.channel_mode);
    r.qf_estimate = qf_estimate;
    reports.push_back(std::move(r));
  }
  return reports;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);
  return s;
}

CorpusReport aggregate(std::vector<PairReport> rows, double cutoff, std::uint64_t seed) {
  std::sort(rows.begin(), rows.end(), [](const PairReport& a, const PairReport& b) {
    return std::tie(a.pair_id, a.variant) < std::tie(b.pair_id, b.variant);
  });
  CorpusReport report;
  report.cutoff = cutoff;
  report.seed = seed;

  std::map<std::string, std::vector<const PairReport*>> by_variant;
  std::map<std::string, std::map<std::string, double>> high_by_pair;
  for (const auto& r : rows) {
    by_variant[r.variant].push_back(&r);
    high_by_pair[r.pair_id][r.variant] = r.high_rel_err;
  }
  report.n_pairs = high_by_pair.size();
  for (const auto& [variant, list] : by_variant) {
    VariantSummary vs;
    vs.variant = variant;
    vs.count = list.size();
    std::vector<double> m, lo, hi;
    for (const auto* r : list) {
      m.push_back(r->mse);
      lo.push_back(r->low_rel_err);
      hi.push_back(r->high_rel_err);
    }
    vs.mse = summarize(std::move(m));
    vs.low_rel_err = summarize(std::move(lo));
    vs.high_rel_err = summarize(std::move(hi));
    report.variants.push_back(std::move(vs));
  }
  std::size_t comparable = 0;
  std::size_t improved = 0;
  for (const auto& [pair, variants] : high_by_pair) {
    auto raw = variants.find(kVariantRawRecon);
    auto aligned = variants.find(kVariantFreqAligned);
    if (raw == variants.end() || aligned == variants.end()) continue;
    ++comparable;
    if (aligned->second < raw->second) ++improved;
  }
  if (comparable > 0) report.fraction_high_improved = static_cast<double>(improved) / comparable;
  report.rows = std::move(rows);
  return report;
}

namespace {

fs::path resolve(const std::string& path, const fs::path& base) {
  const fs::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

CorpusReport corpus_report(const Manifest& manifest, const fs::path& manifest_dir, const ReportOptions& options) {
  check_options(options);
  std::map<std::string, const ManifestEntry*> reals;
  for (const auto& e : manifest.entries) {
    if (e.label == align::Label::kReal) reals[e.pair_id] = &e;
  }
  std::vector<PairReport> rows;
  std::size_t skipped = 0;
  std::vector<std::string> messages;
  for (const auto& e : manifest.entries) {
    if (e.label != align::Label::kSynthetic) continue;
    try {
      if (!e.ok()) throw Error(ErrorCode::kMissingFile, "entry recorded a build failure: " + e.status);
      auto real_it = reals.find(e.pair_id);
      if (real_it == reals.end() || !real_it->second->ok()) throw Error(ErrorCode::kMissingFile, "no usable REAL sibling");
      const auto real_bytes = read_file(resolve(real_it->second->output_path, manifest_dir));
      ImageBuffer real = align::center_crop_multiple(decode_image(real_bytes));
      const ImageBuffer recon = load_image(e.recon_path);
      const ImageBuffer output = load_image(resolve(e.output_path, manifest_dir));
      if (real.channels() == 1 && recon.channels() == 3) real = gray_to_rgb(real);

      std::optional<jpeg::QualityEstimate> estimate;
      if (jpeg::is_jpeg(real_bytes)) estimate = jpeg::estimate_quality(jpeg::extract_quant_tables(real_bytes));
      std::optional<int> qf = e.qf_used;
      if (!qf && estimate) qf = estimate->quality;
      if (!qf && manifest.config.freq_fallback_mode == align::FreqFallbackMode::kUseFallbackQf) qf = manifest.config.fallback_qf;

      std::vector<LabeledImage> variants;
      variants.push_back({kVariantRawRecon, recon});
      if (qf) variants.push_back({kVariantFreqAligned, align::frequency_align(recon, *qf, manifest.config.subsampling)});
      variants.push_back({kVariantDda, output});
      auto reports = pair_report(e.pair_id, real, variants, options, estimate);
      rows.insert(rows.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
    } catch (const Error& err) {
      ++skipped;
      messages.push_back(e.pair_id + ": " + err.what());
    }
  }
  CorpusReport report = aggregate(std::move(rows), options.cutoff, manifest.global_seed);
  report.skipped = skipped;
  std::sort(messages.begin(), messages.end());
  report.skip_messages = std::move(messages);
  return report;
}

namespace {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return number(v);
}

nlohmann::ordered_json summary_json(const Summary& s) {
  return {{"mean", json_number(s.mean)}, {"median", json_number(s.median)}, {"std", json_number(s.std)}};
}

}  // namespace

std::string report_to_csv(const CorpusReport& report) {
  std::ostringstream out;
  out << "pair_id,variant,mse,low_rel_err,high_rel_err,qf_estimate,qf_exact\n";
  for (const auto& r : report.rows) {
    out << csv::field(r.pair_id) << ',' << csv::field(r.variant) << ',' << number(r.mse) << ','
        << number(r.low_rel_err) << ',' << number(r.high_rel_err) << ','
        << (r.qf_estimate ? std::to_string(r.qf_estimate->quality) : "") << ','
        << (r.qf_estimate ? (r.qf_estimate->exact ? "true" : "false") : "") << '\n';
  }
  return out.str();
}

std::string report_to_json(const CorpusReport& report) {
  nlohmann::ordered_json j;
  j["config"] = {{"cutoff", report.cutoff}, {"seed", report.seed}, {"toolkit_version", std::string(kToolkitVersion)}};
  j["n_pairs"] = report.n_pairs;
  j["skipped"] = report.skipped;
  j["skip_messages"] = report.skip_messages;
  j["fraction_high_improved"] =
      report.fraction_high_improved ? nlohmann::ordered_json(*report.fraction_high_improved) : nlohmann::ordered_json(nullptr);
  j["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : report.variants) {
    j["variants"].push_back({{"variant", v.variant},
                             {"count", v.count},
                             {"mse", summary_json(v.mse)},
                             {"low_rel_err", summary_json(v.low_rel_err)},
                             {"high_rel_err", summary_json(v.high_rel_err)}});
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["pair_id"] = r.pair_id;
    row["variant"] = r.variant;
    row["mse"] = json_number(r.mse);
    row["low_rel_err"] = json_number(r.low_rel_err);
    row["high_rel_err"] = json_number(r.high_rel_err);
    row["qf_estimate"] = r.qf_estimate ? nlohmann::ordered_json(r.qf_estimate->quality) : nlohmann::ordered_json(nullptr);
    row["qf_exact"] = r.qf_estimate ? nlohmann::ordered_json(r.qf_estimate->exact) : nlohmann::ordered_json(nullptr);
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace dda::metrics
