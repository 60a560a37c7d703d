#include "iacsmell/ir.hpp"

#include <cctype>
#include <regex>

#include "iacsmell/error.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {

std::string_view to_string(IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible: return "ansible";
    case IacLanguage::Chef: return "chef";
    case IacLanguage::Puppet: return "puppet";
  }
  return "unknown";
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Literal: return "literal";
    case ValueKind::VariableRef: return "variable_ref";
    case ValueKind::Empty: return "empty";
    case ValueKind::Block: return "block";
  }
  return "unknown";
}

std::optional<IacLanguage> language_from_string(std::string_view name) {
  if (text::iequals(name, "ansible")) return IacLanguage::Ansible;
  if (text::iequals(name, "chef")) return IacLanguage::Chef;
  if (text::iequals(name, "puppet")) return IacLanguage::Puppet;
  return std::nullopt;
}

std::optional<IacLanguage> language_from_extension(std::string_view path) {
  if (text::ends_with_ci(path, ".yml") || text::ends_with_ci(path, ".yaml")) {
    return IacLanguage::Ansible;
  }
  if (text::ends_with_ci(path, ".rb")) return IacLanguage::Chef;
  if (text::ends_with_ci(path, ".pp")) return IacLanguage::Puppet;
  return std::nullopt;
}

IacLanguage infer_language(std::string_view path, std::string_view content) {
  if (path.empty()) throw UnknownLanguage("empty path");
  if (auto lang = language_from_extension(path)) return *lang;

  static const std::regex doc_start(R"((^|\n)---)");
  static const std::regex ansible_item(R"((^|\n)[ \t]*- name:)");
  static const std::regex ruby_do(R"(\bdo\b)");
  static const std::regex ruby_end(R"(\bend\b)");
  static const std::regex puppet_class(R"(\bclass\s)");
  static const std::regex puppet_body(R"(\{[\s\S]*=>)");

  std::string s(content);
  if (std::regex_search(s, doc_start) && std::regex_search(s, ansible_item)) {
    return IacLanguage::Ansible;
  }
  if (std::regex_search(s, ruby_do) && std::regex_search(s, ruby_end) &&
      s.find("package ") != std::string::npos) {
    return IacLanguage::Chef;
  }
  if (std::regex_search(s, puppet_class) && std::regex_search(s, puppet_body)) {
    return IacLanguage::Puppet;
  }
  throw UnknownLanguage("cannot infer IaC language for '" + std::string(path) +
                        "'");
}

std::string normalize_key(std::string_view key_raw) {
  std::string key = text::lower(text::trim(key_raw));
  auto strip = [](std::string& k) {
    std::string_view v = text::trim(k);
    v = text::unquote(v);
    while (!v.empty() && (v.front() == '$' || v.front() == ':' ||
                          v.front() == '@')) {
      v.remove_prefix(1);
    }
    k = std::string(text::trim(v));
  };
  strip(key);
  // node['a']['b'] / default["a"]["b"] keep the last subscript.
  if (!key.empty() && key.back() == ']') {
    std::size_t open = key.rfind('[');
    if (open != std::string::npos) {
      key = key.substr(open + 1, key.size() - open - 2);
      strip(key);
    }
  }
  if (std::size_t pos = key.rfind("::"); pos != std::string::npos) {
    key = key.substr(pos + 2);
  }
  if (std::size_t pos = key.rfind('.'); pos != std::string::npos) {
    key = key.substr(pos + 1);
  }
  strip(key);
  return key;
}

ValueKind classify_value(std::string_view value, IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible:
      if (value.find("{{") != std::string_view::npos) {
        return ValueKind::VariableRef;
      }
      break;
    case IacLanguage::Chef:
      if (value.find("#{") != std::string_view::npos ||
          value.find("node[") != std::string_view::npos) {
        return ValueKind::VariableRef;
      }
      break;
    case IacLanguage::Puppet:
      for (std::size_t i = 0; i + 1 < value.size(); ++i) {
        if (value[i] != '$') continue;
        char n = value[i + 1];
        if (n == '{' || n == '_' || n == ':' ||
            std::isalpha(static_cast<unsigned char>(n))) {
          return ValueKind::VariableRef;
        }
      }
      break;
  }
  if (text::unquote(text::trim(value)).empty()) return ValueKind::Empty;
  return ValueKind::Literal;
}

IrAttribute make_attribute(std::string key_raw, std::string value,
                           IacLanguage lang, Span span) {
  IrAttribute attr;
  attr.key_norm = normalize_key(key_raw);
  attr.key_raw = std::move(key_raw);
  attr.value_kind = classify_value(value, lang);
  attr.value_raw = std::move(value);
  attr.span = span;
  return attr;
}

std::vector<std::string> split_lines(std::string_view text,
                                     bool* trailing_newline) {
  std::vector<std::string> lines;
  if (trailing_newline) *trailing_newline = false;
  if (text.empty()) return lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      return lines;
    }
    lines.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (trailing_newline) *trailing_newline = true;
  return lines;
}

std::string IrScript::text() const {
  std::string out;
  std::size_t total = 0;
  for (const auto& l : lines) total += l.size() + 1;
  out.reserve(total);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  if (trailing_newline) out.push_back('\n');
  return out;
}

bool sanitize_utf8(std::string& s) {
  std::string out;
  bool replaced = false;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto cont = [&](std::size_t k) {
    return k < n && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
  };
  out.reserve(n);
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if (c >= 0xC2 && c <= 0xDF) len = 2;
    else if (c >= 0xE0 && c <= 0xEF) len = 3;
    else if (c >= 0xF0 && c <= 0xF4) len = 4;
    bool ok = len > 0;
    for (std::size_t k = 1; ok && k < len; ++k) ok = cont(i + k);
    if (ok && len == 3) {
      unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
      if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 > 0x9F)) ok = false;
    }
    if (ok && len == 4) {
      unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
      if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 > 0x8F)) ok = false;
    }
    if (ok) {
      out.append(s, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      replaced = true;
      ++i;
    }
  }
  if (replaced) s = std::move(out);
  return replaced;
}

bool is_annotation_text(std::string_view comment_text) {
  return text::ltrim(comment_text).starts_with("Security smell!");
}

}  // namespace iacsmell
