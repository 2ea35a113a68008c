#pragma once

#include <string>
#include <string_view>

namespace dda::csv {

/// RFC 4180 quoting for fields that need it.
inline std::string field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace dda::csv
