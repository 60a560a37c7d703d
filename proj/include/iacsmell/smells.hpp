#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace iacsmell {

/// The nine security weaknesses, in catalog order. Detections sort by this
/// order within a line, and stacked annotations follow it.
enum class SmellType : std::uint8_t {
  AdminByDefault,
  EmptyPassword,
  HardCodedSecret,
  UnrestrictedIpAddress,
  SuspiciousComment,
  HttpWithoutTls,
  WeakCryptoAlgorithm,
  NoIntegrityCheck,
  MissingDefaultCase,
};

inline constexpr std::array<SmellType, 9> kAllSmells = {
    SmellType::AdminByDefault,        SmellType::EmptyPassword,
    SmellType::HardCodedSecret,       SmellType::UnrestrictedIpAddress,
    SmellType::SuspiciousComment,     SmellType::HttpWithoutTls,
    SmellType::WeakCryptoAlgorithm,   SmellType::NoIntegrityCheck,
    SmellType::MissingDefaultCase,
};

inline constexpr std::size_t kSmellCount = kAllSmells.size();

struct SmellInfo {
  SmellType type;
  std::string_view id;          // "HardCodedSecret"
  int cwe;                      // 798
  std::string_view title;       // "Hard-coded secret"
  std::string_view advice;      // fixed advice sentence
  std::string_view short_label; // "HardCd", column header in reports
};

const SmellInfo& smell_info(SmellType type);

inline std::size_t index_of(SmellType type) {
  return static_cast<std::size_t>(type);
}

inline std::string_view smell_id(SmellType type) { return smell_info(type).id; }
inline std::string_view smell_title(SmellType type) {
  return smell_info(type).title;
}
inline std::string_view smell_advice(SmellType type) {
  return smell_info(type).advice;
}

/// "IAC-CWE-798"
std::string rule_id(SmellType type);

/// Accepts the variant id ("HardCodedSecret"), "CWE-798", "IAC-CWE-798" or
/// the canonical title, case-insensitively.
std::optional<SmellType> smell_from_string(std::string_view text);

/// Lenient title match used when reading annotation comments written by
/// people or models: ignores case, punctuation and a trailing plural "s",
/// and accepts a few common spellings ("hardcoded secret",
/// "use of http without tls", ...). Matches a prefix of `text`.
std::optional<SmellType> smell_from_title_prefix(std::string_view text);

}  // namespace iacsmell
