#include "iacsmell/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "iacsmell/error.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {
namespace {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  std::map<std::string, ConfigFile::Value> run() {
    while (skip_blank_lines()) {
      if (s_[i_] == '[') {
        section();
      } else {
        pair();
      }
    }
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
  }

  void skip_comment() {
    if (i_ < s_.size() && s_[i_] == '#') {
      while (i_ < s_.size() && s_[i_] != '\n') ++i_;
    }
  }

  // Skips whitespace, comments and newlines (inside arrays too).
  void skip_all() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (i_ < s_.size() && s_[i_] == '\n') {
        ++i_;
        ++line_;
        continue;
      }
      return;
    }
  }

  bool skip_blank_lines() {
    skip_all();
    return i_ < s_.size();
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (i_ < s_.size()) {
      if (s_[i_] != '\n') fail("unexpected text after value");
      ++i_;
      ++line_;
    }
  }

  std::string bare_key() {
    skip_ws();
    if (i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'')) return string_value();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
                              s_[i_] == '_' || s_[i_] == '-' || s_[i_] == '.')) {
      ++i_;
    }
    if (b == i_) fail("expected a key");
    return std::string(s_.substr(b, i_ - b));
  }

  void section() {
    ++i_;
    section_ = bare_key();
    skip_ws();
    if (i_ >= s_.size() || s_[i_] != ']') fail("unterminated section header");
    ++i_;
    end_of_line();
  }

  void pair() {
    std::string key = bare_key();
    skip_ws();
    if (i_ >= s_.size() || s_[i_] != '=') fail("expected '=' after key '" + key + "'");
    ++i_;
    skip_ws();
    ConfigFile::Value v = value();
    std::string full = section_.empty() ? key : section_ + "." + key;
    if (out_.contains(full)) fail("duplicate key '" + full + "'");
    out_.emplace(std::move(full), std::move(v));
    end_of_line();
  }

  std::string string_value() {
    const char q = s_[i_++];
    std::string out;
    while (i_ < s_.size() && s_[i_] != q) {
      char c = s_[i_];
      if (c == '\n') fail("unterminated string");
      if (q == '"' && c == '\\' && i_ + 1 < s_.size()) {
        char e = s_[++i_];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        ++i_;
        continue;
      }
      out.push_back(c);
      ++i_;
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  ConfigFile::Value value() {
    if (i_ >= s_.size()) fail("missing value");
    char c = s_[i_];
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') {
      ++i_;
      std::vector<std::string> items;
      for (;;) {
        skip_all();
        if (i_ >= s_.size()) fail("unterminated array");
        if (s_[i_] == ']') {
          ++i_;
          return items;
        }
        if (s_[i_] != '"' && s_[i_] != '\'') fail("arrays may only hold strings");
        items.push_back(string_value());
        skip_all();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        else if (i_ < s_.size() && s_[i_] != ']') fail("expected ',' or ']' in array");
      }
    }
    std::size_t b = i_;
    while (i_ < s_.size() && s_[i_] != '\n' && s_[i_] != '#' && s_[i_] != ' ' &&
           s_[i_] != '\t' && s_[i_] != '\r') {
      ++i_;
    }
    std::string tok(s_.substr(b, i_ - b));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char d : tok) {
      if (d != '_') digits.push_back(d);
    }
    try {
      std::size_t used = 0;
      if (digits.find_first_of(".eE") == std::string::npos) {
        std::int64_t n = std::stoll(digits, &used);
        if (used == digits.size()) return n;
      } else {
        double d = std::stod(digits, &used);
        if (used == digits.size()) return d;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::string section_;
  std::map<std::string, ConfigFile::Value> out_;
};

template <typename T>
std::optional<T> get_as(const std::map<std::string, ConfigFile::Value>& values,
                        const std::string& key) {
  auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  throw ConfigError("config key '" + key + "' has the wrong type");
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  cfg.values_ = TomlReader(text).run();
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const {
  return get_as<std::string>(values_, key);
}

std::optional<std::int64_t> ConfigFile::get_int(const std::string& key) const {
  return get_as<std::int64_t>(values_, key);
}

std::optional<double> ConfigFile::get_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end()) {
    if (const auto* n = std::get_if<std::int64_t>(&it->second)) {
      return static_cast<double>(*n);
    }
  }
  return get_as<double>(values_, key);
}

std::optional<bool> ConfigFile::get_bool(const std::string& key) const {
  return get_as<bool>(values_, key);
}

std::optional<std::vector<std::string>> ConfigFile::get_list(
    const std::string& key) const {
  return get_as<std::vector<std::string>>(values_, key);
}

}  // namespace iacsmell
