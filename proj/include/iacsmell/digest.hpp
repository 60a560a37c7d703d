#pragma once

#include <string>
#include <string_view>

namespace iacsmell {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// SHA-256 of the text with every whitespace run collapsed to one space and
/// the ends trimmed. Used for near-duplicate exclusion.
std::string normalized_sha256_hex(std::string_view data);

}  // namespace iacsmell
