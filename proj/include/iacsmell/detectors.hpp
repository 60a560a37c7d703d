#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iacsmell/ir.hpp"
#include "iacsmell/smells.hpp"

namespace iacsmell {

struct Detection {
  SmellType smell = SmellType::HardCodedSecret;
  Span span;
  std::string evidence;  // at most 120 bytes
  std::string message;   // advice sentence for `smell`

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Keyword lists behind the nine rules. All entries are lowercase.
struct RuleConfig {
  std::set<std::string> password_keys;
  std::set<std::string> secret_keys;
  std::set<std::string> user_keys;
  std::set<std::string> privileged_values;
  std::set<std::string> suspicious_tokens;
  std::set<std::string> weak_algo_tokens;
  std::set<std::string> integrity_disable_keys;
  std::set<std::string> checksum_keys;
  std::set<std::string> artifact_extensions;
  std::set<std::string> http_allowlist;
  // Values that never count as a hard-coded secret (flags and wildcards).
  std::set<std::string> non_secret_values;
  // Values of integrity_disable_keys that switch the check off.
  std::set<std::string> integrity_disable_values;

  static RuleConfig defaults();
};

/// Reads `[rules]` (or root-level) string arrays named after the RuleConfig
/// fields; each present key replaces the default set. Throws ConfigError.
RuleConfig load_rule_config(const std::filesystem::path& path);
RuleConfig rule_config_from_text(std::string_view toml);

/// Runs the nine rules. Result is sorted by (start_line, smell) and every
/// span lies within `script.lines`.
std::vector<Detection> detect(const IrScript& script,
                              const RuleConfig& cfg = RuleConfig::defaults());

}  // namespace iacsmell
