#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace dda {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);

/// Lowercase hex SHA-256, the manifest's content_hash format.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Per-pair RNG seed: the first 8 bytes, read little-endian, of
/// SHA-256("dda-item-seed/1" || 0x00 || le64(global_seed) || pair_id).
/// Part of the manifest format contract; changing it requires a new
/// manifest version.
std::uint64_t derive_item_seed(std::uint64_t global_seed, std::string_view pair_id);

}  // namespace dda
