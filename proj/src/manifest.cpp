#include "dda/manifest.hpp"

#include <json.hpp>

#include <sstream>

#include "dda/error.hpp"
#include "dda/image_io.hpp"
#include "csv.hpp"

namespace dda {

namespace {

using Json = nlohmann::ordered_json;

Json config_to_json(const align::AlignConfig& config) {
  Json j;
  j["R_pixel"] = config.r_pixel;
  j["p_pixel"] = config.p_pixel;
  j["p_freq"] = config.p_freq;
  j["fallback_qf"] = config.fallback_qf;
  j["freq_fallback_mode"] = std::string(align::fallback_mode_name(config.freq_fallback_mode));
  j["subsampling"] = std::string(jpeg::subsampling_name(config.subsampling));
  j["emit_compressed_bytes"] = config.emit_compressed_bytes;
  j["seed"] = config.seed;
  return j;
}

align::AlignConfig config_from_json(const Json& j) {
  align::AlignConfig config;
  config.r_pixel = j.at("R_pixel").get<double>();
  config.p_pixel = j.at("p_pixel").get<double>();
  config.p_freq = j.at("p_freq").get<double>();
  config.fallback_qf = j.at("fallback_qf").get<int>();
  config.freq_fallback_mode = align::parse_fallback_mode(j.at("freq_fallback_mode").get<std::string>());
  config.subsampling = jpeg::parse_subsampling(j.at("subsampling").get<std::string>());
  config.emit_compressed_bytes = j.at("emit_compressed_bytes").get<bool>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

Json entry_to_json(const ManifestEntry& e) {
  Json j;
  j["pair_id"] = e.pair_id;
  j["real_path"] = e.real_path;
  j["recon_path"] = e.recon_path;
  j["output_path"] = e.output_path;
  j["label"] = std::string(align::label_name(e.label));
  j["applied_freq"] = e.applied_freq;
  j["applied_pixel"] = e.applied_pixel;
  j["qf_used"] = e.qf_used ? Json(*e.qf_used) : Json(nullptr);
  j["r_pixel_used"] = e.r_pixel_used ? Json(*e.r_pixel_used) : Json(nullptr);
  j["content_hash"] = e.content_hash;
  j["status"] = e.status;
  return j;
}

ManifestEntry entry_from_json(const Json& j) {
  ManifestEntry e;
  e.pair_id = j.at("pair_id").get<std::string>();
  e.real_path = j.at("real_path").get<std::string>();
  e.recon_path = j.at("recon_path").get<std::string>();
  e.output_path = j.at("output_path").get<std::string>();
  const auto label = j.at("label").get<std::string>();
  if (label == "REAL") {
    e.label = align::Label::kReal;
  } else if (label == "SYNTHETIC") {
    e.label = align::Label::kSynthetic;
  } else {
    throw Error(ErrorCode::kManifestCorrupt, "unknown label '" + label + "'");
  }
  e.applied_freq = j.at("applied_freq").get<bool>();
  e.applied_pixel = j.at("applied_pixel").get<bool>();
  if (!j.at("qf_used").is_null()) e.qf_used = j.at("qf_used").get<int>();
  if (!j.at("r_pixel_used").is_null()) e.r_pixel_used = j.at("r_pixel_used").get<double>();
  e.content_hash = j.at("content_hash").get<std::string>();
  e.status = j.at("status").get<std::string>();
  return e;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string manifest_to_json(const Manifest& manifest) {
  Json j;
  j["version"] = manifest.version;
  j["toolkit_version"] = std::string(kToolkitVersion);
  j["global_seed"] = manifest.global_seed;
  j["config"] = config_to_json(manifest.config);
  j["entries"] = Json::array();
  for (const auto& e : manifest.entries) j["entries"].push_back(entry_to_json(e));
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    Manifest manifest;
    manifest.version = j.at("version").get<std::string>();
    manifest.global_seed = j.at("global_seed").get<std::uint64_t>();
    manifest.config = config_from_json(j.at("config"));
    for (const auto& entry : j.at("entries")) manifest.entries.push_back(entry_from_json(entry));
    return manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestCorrupt, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kManifestCorrupt) throw;
    throw Error(ErrorCode::kManifestCorrupt, e.detail());
  }
}

std::string manifest_to_csv(const Manifest& manifest) {
  std::ostringstream out;
  out << "pair_id,real_path,recon_path,output_path,label,applied_freq,applied_pixel,qf_used,r_pixel_used,"
         "content_hash,status\n";
  for (const auto& e : manifest.entries) {
    out << csv::field(e.pair_id) << ',' << csv::field(e.real_path) << ',' << csv::field(e.recon_path) << ','
        << csv::field(e.output_path) << ',' << align::label_name(e.label) << ',' << (e.applied_freq ? "true" : "false")
        << ',' << (e.applied_pixel ? "true" : "false") << ',' << (e.qf_used ? std::to_string(*e.qf_used) : "") << ','
        << (e.r_pixel_used ? format_double(*e.r_pixel_used) : "") << ',' << e.content_hash << ','
        << csv::field(e.status) << '\n';
  }
  return out.str();
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return manifest_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  const std::string text = manifest_to_json(manifest);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace dda
