#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dda/align.hpp"

namespace dda {

inline constexpr std::string_view kToolkitVersion = "0.3.0";

/// Pins the manifest schema, the content hash (SHA-256 of file bytes) and
/// the per-item seed derivation (see derive_item_seed).
inline constexpr std::string_view kManifestVersion = "dda-manifest/1+sha256";

struct ManifestEntry {
  std::string pair_id;
  std::string real_path;    ///< source path as given to the builder
  std::string recon_path;   ///< source path as given; empty for REAL entries
  std::string output_path;  ///< relative to the manifest directory; empty on failure
  align::Label label = align::Label::kSynthetic;
  bool applied_freq = false;
  bool applied_pixel = false;
  std::optional<int> qf_used;
  std::optional<double> r_pixel_used;
  std::string content_hash;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct Manifest {
  std::string version{kManifestVersion};
  std::uint64_t global_seed = 0;
  align::AlignConfig config;
  std::vector<ManifestEntry> entries;
};

/// Stable, pretty-printed JSON; identical manifests serialize identically.
std::string manifest_to_json(const Manifest& manifest);
/// Throws ManifestCorrupt on syntax or schema errors.
Manifest manifest_from_json(std::string_view text);

/// One row per entry, headered, same field order as the JSON entries.
std::string manifest_to_csv(const Manifest& manifest);

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace dda
