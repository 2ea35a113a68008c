#include "dda/hash.hpp"

#include <openssl/evp.h>

#include <vector>

#include "dda/error.hpp"

namespace dda {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1 || length != 32) {
    throw Error(ErrorCode::kIo, "SHA-256 computation failed");
  }
  return digest;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  const auto digest = sha256(bytes);
  std::string out;
  out.reserve(64);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0F]);
  }
  return out;
}

std::uint64_t derive_item_seed(std::uint64_t global_seed, std::string_view pair_id) {
  static constexpr std::string_view kTag = "dda-item-seed/1";
  std::vector<std::uint8_t> message(kTag.begin(), kTag.end());
  message.push_back(0x00);
  for (int i = 0; i < 8; ++i) message.push_back(static_cast<std::uint8_t>(global_seed >> (8 * i)));
  message.insert(message.end(), pair_id.begin(), pair_id.end());
  const auto digest = sha256(message);
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | digest[i];
  return seed;
}

}  // namespace dda
