#include "iacsmell/smells.hpp"

#include <cctype>
#include <utility>
#include <vector>

#include "iacsmell/text.hpp"

namespace iacsmell {
namespace {

constexpr std::array<SmellInfo, kSmellCount> kCatalog = {{
    {SmellType::AdminByDefault, "AdminByDefault", 250, "Admin by default",
     "please avoid default administrative privileges; follow least privilege.",
     "AdmDef"},
    {SmellType::EmptyPassword, "EmptyPassword", 258, "Empty password",
     "please set a strong, non-empty password.", "EmpPw"},
    {SmellType::HardCodedSecret, "HardCodedSecret", 798, "Hard-coded secret",
     "please remove hard-coded secrets to prevent exposure of sensitive "
     "information.",
     "HardCd"},
    {SmellType::UnrestrictedIpAddress, "UnrestrictedIpAddress", 284,
     "Unrestricted IP address", "please do not bind to 0.0.0.0.", "UnrIP"},
    {SmellType::SuspiciousComment, "SuspiciousComment", 546,
     "Suspicious comment",
     "please resolve the issue referenced by this comment.", "SusCmt"},
    {SmellType::HttpWithoutTls, "HttpWithoutTls", 319,
     "Use of HTTP without SSL/TLS",
     "please use HTTPS instead of HTTP to prevent man-in-the-middle attacks.",
     "NoTLS"},
    {SmellType::WeakCryptoAlgorithm, "WeakCryptoAlgorithm", 327,
     "Weak cryptography algorithm",
     "please use a strong cryptographic algorithm such as SHA-256.",
     "WeakAlg"},
    {SmellType::NoIntegrityCheck, "NoIntegrityCheck", 494,
     "No integrity check",
     "please verify downloaded content with checksums or GPG signatures.",
     "NoItChk"},
    {SmellType::MissingDefaultCase, "MissingDefaultCase", 478,
     "Missing default in case statement",
     "please handle all input cases in conditionals.", "NoDefSw"},
}};

std::string alnum_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

// Normalized spellings accepted in annotation headers.
const std::vector<std::pair<std::string, SmellType>>& title_aliases() {
  static const std::vector<std::pair<std::string, SmellType>> aliases = [] {
    std::vector<std::pair<std::string, SmellType>> a;
    for (const auto& info : kCatalog) a.emplace_back(alnum_lower(info.title), info.type);
    a.emplace_back("adminbydefault", SmellType::AdminByDefault);
    a.emplace_back("hardcodedsecret", SmellType::HardCodedSecret);
    a.emplace_back("hardcodedpassword", SmellType::HardCodedSecret);
    a.emplace_back("hardcodedcredential", SmellType::HardCodedSecret);
    a.emplace_back("unrestrictedip", SmellType::UnrestrictedIpAddress);
    a.emplace_back("useofhttpwithouttls", SmellType::HttpWithoutTls);
    a.emplace_back("useofhttpwithoutssl", SmellType::HttpWithoutTls);
    a.emplace_back("httpwithouttls", SmellType::HttpWithoutTls);
    a.emplace_back("httpwithoutssl", SmellType::HttpWithoutTls);
    a.emplace_back("useofweakcrypto", SmellType::WeakCryptoAlgorithm);
    a.emplace_back("weakcrypto", SmellType::WeakCryptoAlgorithm);
    a.emplace_back("missingdefaultcase", SmellType::MissingDefaultCase);
    a.emplace_back("missingdefault", SmellType::MissingDefaultCase);
    return a;
  }();
  return aliases;
}

}  // namespace

const SmellInfo& smell_info(SmellType type) { return kCatalog[index_of(type)]; }

std::string rule_id(SmellType type) {
  return "IAC-CWE-" + std::to_string(smell_info(type).cwe);
}

std::optional<SmellType> smell_from_string(std::string_view text) {
  std::string_view t = text::trim(text);
  for (const auto& info : kCatalog) {
    if (text::iequals(t, info.id) || text::iequals(t, info.title) ||
        text::iequals(t, "CWE-" + std::to_string(info.cwe)) ||
        text::iequals(t, "IAC-CWE-" + std::to_string(info.cwe))) {
      return info.type;
    }
  }
  return std::nullopt;
}

std::optional<SmellType> smell_from_title_prefix(std::string_view text) {
  std::string norm = alnum_lower(text);
  for (const auto& [alias, type] : title_aliases()) {
    if (norm.starts_with(alias)) return type;
  }
  return std::nullopt;
}

}  // namespace iacsmell
