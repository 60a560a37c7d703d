#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iacsmell {

/// A small TOML subset: `[section]` headers, `key = value` where value is a
/// basic or literal string, an integer, a float, a boolean or an array of
/// strings (arrays may span lines), and `#` comments.
class ConfigFile {
 public:
  using Value = std::variant<std::string, std::int64_t, double, bool,
                             std::vector<std::string>>;

  /// Throws ConfigError with the offending line number.
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path& path);

  /// Keys are addressed as "section.key" ("key" for the root table).
  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<std::string>> get_list(const std::string& key) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace iacsmell
