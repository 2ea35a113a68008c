#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dda/image.hpp"
#include "dda/jpeg_tables.hpp"
#include "dda/manifest.hpp"
#include "dda/spectral.hpp"

namespace dda::metrics {

/// Mean squared difference over every pixel and channel, in the units of
/// the samples (8-bit scale for pixel data). Throws ShapeMismatch.
double mse(const ImageBuffer& a, const ImageBuffer& b);

struct LabeledImage {
  std::string label;
  ImageBuffer image;
};

struct ReportOptions {
  double cutoff = 0.5;
  int block = 8;
  spectral::ChannelMode channel_mode = spectral::ChannelMode::kLuma;
  bool normalize_mse = false;  ///< report MSE on the [0,1] scale instead of [0,255]
};

struct PairReport {
  std::string pair_id;
  std::string variant;
  double mse = 0.0;
  double low_rel_err = 0.0;
  double high_rel_err = 0.0;
  spectral::EnergyGrid hf_grid_real;
  spectral::EnergyGrid hf_grid_syn;
  std::optional<jpeg::QualityEstimate> qf_estimate;
};

/// One report per labeled variant, each measured against `real`.
std::vector<PairReport> pair_report(const std::string& pair_id, const ImageBuffer& real,
                                    std::span<const LabeledImage> variants, const ReportOptions& options = {},
                                    std::optional<jpeg::QualityEstimate> qf_estimate = std::nullopt);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  ///< population standard deviation
};

struct VariantSummary {
  std::string variant;
  std::size_t count = 0;
  Summary mse;
  Summary low_rel_err;
  Summary high_rel_err;
};

inline constexpr const char* kVariantRawRecon = "raw-recon";
inline constexpr const char* kVariantFreqAligned = "freq-aligned";
inline constexpr const char* kVariantDda = "dda-full";

struct CorpusReport {
  std::size_t n_pairs = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skip_messages;
  std::vector<PairReport> rows;           ///< sorted by (pair_id, variant)
  std::vector<VariantSummary> variants;   ///< sorted by variant label
  /// Share of pairs whose freq-aligned high-band error is strictly below the
  /// raw reconstruction's; absent when no pair has both variants.
  std::optional<double> fraction_high_improved;
  double cutoff = 0.5;
  std::uint64_t seed = 0;
};

Summary summarize(std::vector<double> values);

/// Aggregates rows into a report. Rows are sorted first, so the result does
/// not depend on their order.
CorpusReport aggregate(std::vector<PairReport> rows, double cutoff, std::uint64_t seed);

/// Evaluates every SYNTHETIC entry of a built dataset against its REAL
/// sibling (center-cropped) with three variants: the source reconstruction
/// (raw-recon), the reconstruction compressed at the real image's estimated
/// quality (freq-aligned) and the written output (dda-full). Relative paths
/// resolve against `manifest_dir` for outputs and the working directory for
/// sources. Unreadable entries are skipped and counted.
CorpusReport corpus_report(const Manifest& manifest, const std::filesystem::path& manifest_dir,
                           const ReportOptions& options = {});

/// Columns: pair_id,variant,mse,low_rel_err,high_rel_err,qf_estimate,qf_exact
std::string report_to_csv(const CorpusReport& report);
/// CSV rows plus summaries and a config echo (cutoff, seed, toolkit version).
std::string report_to_json(const CorpusReport& report);

}  // namespace dda::metrics
