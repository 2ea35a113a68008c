#include "dda/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "dda/error.hpp"
#include "dda/hash.hpp"
#include "dda/image_io.hpp"

namespace dda::dataset {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> list_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::kMissingFile, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

std::map<std::string, fs::path> index_by_stem(const std::vector<fs::path>& files) {
  std::map<std::string, fs::path> by_stem;
  for (const auto& f : files) {
    auto [it, inserted] = by_stem.emplace(f.stem().string(), f);
    if (!inserted) {
      throw Error(ErrorCode::kAmbiguousMatch, "stem '" + f.stem().string() + "' matches both " +
                                                  it->second.filename().string() + " and " + f.filename().string());
    }
  }
  return by_stem;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct PairResult {
  ManifestEntry real;
  ManifestEntry synthetic;
  bool ok = false;
};

std::string generic(const fs::path& p) { return p.generic_string(); }

PairResult process_pair(const InputPair& pair, const align::AlignConfig& config, const fs::path& out_dir) {
  PairResult result;
  result.real.pair_id = result.synthetic.pair_id = pair.pair_id;
  result.real.real_path = result.synthetic.real_path = generic(pair.real);
  result.synthetic.recon_path = generic(pair.recon);
  result.real.label = align::Label::kReal;
  result.synthetic.label = align::Label::kSynthetic;
  try {
    const auto real_bytes = read_file(pair.real);
    const auto recon_bytes = read_file(pair.recon);
    const ImageBuffer recon = decode_image(recon_bytes);
    Rng rng(derive_item_seed(config.seed, pair.pair_id));
    const align::AlignedSample sample = align::dda_align_pair(real_bytes, recon, config, rng);

    const fs::path real_rel = fs::path("real") / (pair.pair_id + pair.real.extension().string());
    std::vector<std::uint8_t> syn_bytes;
    fs::path syn_rel;
    if (sample.compressed_bytes) {
      syn_bytes = *sample.compressed_bytes;
      syn_rel = fs::path("syn") / (pair.pair_id + ".jpg");
    } else if (!sample.applied_freq && !sample.applied_pixel && is_png(recon_bytes)) {
      syn_bytes = recon_bytes;  // untouched reconstruction persists verbatim
      syn_rel = fs::path("syn") / (pair.pair_id + ".png");
    } else {
      syn_bytes = encode_png(sample.image);
      syn_rel = fs::path("syn") / (pair.pair_id + ".png");
    }
    write_file(out_dir / real_rel, real_bytes);
    write_file(out_dir / syn_rel, syn_bytes);

    result.real.output_path = generic(real_rel);
    result.real.content_hash = sha256_hex(real_bytes);
    result.synthetic.output_path = generic(syn_rel);
    result.synthetic.content_hash = sha256_hex(syn_bytes);
    result.synthetic.applied_freq = sample.applied_freq;
    result.synthetic.applied_pixel = sample.applied_pixel;
    result.synthetic.qf_used = sample.qf_used;
    result.synthetic.r_pixel_used = sample.r_pixel_used;
    result.ok = true;
  } catch (const std::exception& e) {
    result.real.status = result.synthetic.status = std::string("error: ") + e.what();
  }
  return result;
}

}  // namespace

Pairing pair_inputs(const fs::path& real_dir, const fs::path& recon_dir) {
  const auto reals = index_by_stem(list_files(real_dir));
  const auto recons = index_by_stem(list_files(recon_dir));
  Pairing pairing;
  for (const auto& [stem, path] : reals) {
    auto it = recons.find(stem);
    if (it == recons.end()) {
      pairing.unmatched_real.push_back(path);
    } else {
      pairing.pairs.push_back({stem, path, it->second});
    }
  }
  for (const auto& [stem, path] : recons) {
    if (!reals.contains(stem)) pairing.unmatched_recon.push_back(path);
  }
  if (pairing.pairs.empty()) throw Error(ErrorCode::kNoPairs, "no stems shared by " + real_dir.string() + " and " + recon_dir.string());
  return pairing;
}

Pairing pair_inputs_csv(const fs::path& real_dir, const fs::path& recon_dir, const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open pairing CSV " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "real,recon") {
    throw Error(ErrorCode::kOutOfRange, "pairing CSV must start with the header 'real,recon'");
  }
  std::map<std::string, InputPair> pairs;
  std::set<std::string> recon_names;
  Pairing pairing;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kOutOfRange, "pairing CSV row without comma: " + line);
    const std::string real_name = trim(line.substr(0, comma));
    const std::string recon_name = trim(line.substr(comma + 1));
    const fs::path real = real_dir / real_name;
    const fs::path recon = recon_dir / recon_name;
    std::error_code ec;
    if (!fs::is_regular_file(real, ec)) {
      pairing.unmatched_real.push_back(real);
      continue;
    }
    if (!fs::is_regular_file(recon, ec)) {
      pairing.unmatched_recon.push_back(recon);
      continue;
    }
    const std::string id = real.stem().string();
    if (pairs.contains(id)) throw Error(ErrorCode::kAmbiguousMatch, "pair id '" + id + "' listed twice");
    if (!recon_names.insert(recon_name).second) {
      throw Error(ErrorCode::kAmbiguousMatch, "reconstruction '" + recon_name + "' assigned twice");
    }
    pairs.emplace(id, InputPair{id, real, recon});
  }
  for (auto& [id, pair] : pairs) pairing.pairs.push_back(std::move(pair));
  if (pairing.pairs.empty()) throw Error(ErrorCode::kNoPairs, "pairing CSV yielded no usable pairs");
  return pairing;
}

Manifest build_dataset(const std::vector<InputPair>& pairs, const BuildOptions& options, const fs::path& out_dir) {
  options.config.validate();
  if (pairs.empty()) throw Error(ErrorCode::kNoPairs, "nothing to build");
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    if (!ids.insert(p.pair_id).second) throw Error(ErrorCode::kAmbiguousMatch, "duplicate pair id '" + p.pair_id + "'");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<PairResult> results(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) results[i] = process_pair(pairs[i], options.config, out_dir);
  };
  const unsigned jobs = std::clamp<unsigned>(options.jobs, 1, static_cast<unsigned>(pairs.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
  }

  // Ordered reduction by pair_id, independent of completion order.
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].pair_id < pairs[b].pair_id; });

  Manifest manifest;
  manifest.global_seed = options.config.seed;
  manifest.config = options.config;
  std::size_t succeeded = 0;
  for (std::size_t i : order) {
    manifest.entries.push_back(results[i].real);
    manifest.entries.push_back(results[i].synthetic);
    succeeded += results[i].ok ? 1 : 0;
  }
  write_manifest(out_dir / "manifest.json", manifest);
  const std::string csv = manifest_to_csv(manifest);
  write_file(out_dir / "manifest.csv", std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  if (succeeded == 0) throw Error(ErrorCode::kAllEntriesFailed, "every pair failed; see " + (out_dir / "manifest.json").string());
  return manifest;
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const EntryCheck& e) { return !e.ok && !e.skipped; }));
}

VerificationReport verify_manifest(const fs::path& manifest_path) {
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();

  std::set<std::pair<std::string, align::Label>> seen;
  std::set<std::string> real_ids;
  for (const auto& e : manifest.entries) {
    if (!seen.emplace(e.pair_id, e.label).second) {
      throw Error(ErrorCode::kManifestCorrupt, "duplicate " + std::string(align::label_name(e.label)) + " entry for pair_id '" + e.pair_id + "'");
    }
    if (e.label == align::Label::kReal) real_ids.insert(e.pair_id);
  }
  for (const auto& e : manifest.entries) {
    if (e.label == align::Label::kSynthetic && !real_ids.contains(e.pair_id)) {
      throw Error(ErrorCode::kManifestCorrupt, "SYNTHETIC entry '" + e.pair_id + "' has no REAL sibling");
    }
  }

  VerificationReport report;
  for (const auto& e : manifest.entries) {
    EntryCheck check{e.pair_id, e.label, false, false, {}};
    if (!e.ok()) {
      check.skipped = true;
      check.message = e.status;
      report.entries.push_back(std::move(check));
      continue;
    }
    std::ostringstream problems;
    if (e.applied_pixel && (!e.r_pixel_used || *e.r_pixel_used < 0.0 || *e.r_pixel_used > manifest.config.r_pixel)) {
      problems << "applied_pixel without r_pixel_used in [0, R_pixel]; ";
    }
    if (e.applied_freq && !e.qf_used) problems << "applied_freq without qf_used; ";
    if (e.label == align::Label::kReal && (e.applied_freq || e.applied_pixel)) problems << "REAL entry marked as aligned; ";
    try {
      const auto bytes = read_file(root / e.output_path);
      if (sha256_hex(bytes) != e.content_hash) problems << "content hash mismatch; ";
    } catch (const Error& err) {
      problems << err.what() << "; ";
    }
    check.message = problems.str();
    check.ok = check.message.empty();
    if (check.ok) check.message = "ok";
    report.entries.push_back(std::move(check));
  }
  return report;
}

}  // namespace dda::dataset
