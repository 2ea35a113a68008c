#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dda/align.hpp"
#include "dda/manifest.hpp"

namespace dda::dataset {

struct InputPair {
  std::string pair_id;
  std::filesystem::path real;
  std::filesystem::path recon;
};

struct Pairing {
  std::vector<InputPair> pairs;  ///< sorted by pair_id
  std::vector<std::filesystem::path> unmatched_real;
  std::vector<std::filesystem::path> unmatched_recon;
};

/// Matches regular, non-hidden files of the two directories by stem.
/// Throws AmbiguousMatch when a stem repeats within one directory, NoPairs
/// when nothing matches, MissingFile when a directory is unreadable.
Pairing pair_inputs(const std::filesystem::path& real_dir, const std::filesystem::path& recon_dir);

/// Explicit pairing from a CSV with header `real,recon`; names are relative
/// to the respective directories and the pair id is the real file's stem.
Pairing pair_inputs_csv(const std::filesystem::path& real_dir, const std::filesystem::path& recon_dir,
                        const std::filesystem::path& csv_path);

struct BuildOptions {
  align::AlignConfig config;
  unsigned jobs = 1;
};

/// Aligns every pair and writes out_dir/real/<id><ext> (byte copy of the
/// real source), out_dir/syn/<id>.png (or .jpg for compressed persistence),
/// out_dir/manifest.json and out_dir/manifest.csv. Each pair draws from
/// its own stream seeded with derive_item_seed(config.seed, pair_id), so the
/// result does not depend on scheduling or on the other pairs. Failures are
/// recorded per entry; throws AllEntriesFailed (after writing the manifest)
/// only when no pair succeeds.
Manifest build_dataset(const std::vector<InputPair>& pairs, const BuildOptions& options,
                       const std::filesystem::path& out_dir);

struct EntryCheck {
  std::string pair_id;
  align::Label label = align::Label::kSynthetic;
  bool ok = false;
  bool skipped = false;  ///< entry recorded a build failure; nothing to verify
  std::string message;
};

struct VerificationReport {
  std::vector<EntryCheck> entries;

  std::size_t failures() const;
  bool all_ok() const { return failures() == 0; }
};

/// Re-hashes every written file and re-checks provenance invariants. Throws
/// ManifestCorrupt when the manifest cannot be parsed, repeats a
/// (pair_id, label) combination, or has a SYNTHETIC entry without a REAL
/// sibling.
VerificationReport verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace dda::dataset
