#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iacsmell {

enum class IacLanguage { Ansible, Chef, Puppet };

std::string_view to_string(IacLanguage lang);
/// "ansible" / "chef" / "puppet", case-insensitive.
std::optional<IacLanguage> language_from_string(std::string_view name);

/// `.yml|.yaml` -> Ansible, `.rb` -> Chef, `.pp` -> Puppet; otherwise the
/// content is sniffed. Throws UnknownLanguage when nothing matches.
IacLanguage infer_language(std::string_view path, std::string_view content);

/// Extension rule only.
std::optional<IacLanguage> language_from_extension(std::string_view path);

/// Line-oriented source range. Lines are 1-based; start_col is 1-based with
/// 0 meaning unknown.
struct Span {
  int start_line = 1;
  int end_line = 1;
  int start_col = 0;

  bool valid_within(std::size_t line_count) const {
    return start_line >= 1 && end_line >= start_line &&
           static_cast<std::size_t>(end_line) <= line_count;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class ValueKind { Literal, VariableRef, Empty, Block };

std::string_view to_string(ValueKind kind);

struct IrAttribute {
  std::string key_raw;
  std::string key_norm;
  std::string value_raw;  // scalar text with surrounding quotes removed
  ValueKind value_kind = ValueKind::Literal;
  Span span;

  friend bool operator==(const IrAttribute&, const IrAttribute&) = default;
};

struct IrUnit {
  std::string kind;  // module / resource type, or play, class, bare, ...
  std::string name;
  std::vector<IrAttribute> attributes;
  Span span;

  friend bool operator==(const IrUnit&, const IrUnit&) = default;
};

struct IrComment {
  std::string text;  // without the leading '#'
  Span span;
  bool is_annotation = false;

  friend bool operator==(const IrComment&, const IrComment&) = default;
};

struct IrCase {
  std::string subject;
  int branch_count = 0;  // non-default arms only
  bool has_default = false;
  Span span;

  friend bool operator==(const IrCase&, const IrCase&) = default;
};

struct ParseError {
  int line = 0;
  std::string reason;

  friend bool operator==(const ParseError&, const ParseError&) = default;
};

/// Technology-agnostic view of one IaC file. Built once by a parser and
/// treated as immutable afterwards.
struct IrScript {
  IacLanguage language = IacLanguage::Ansible;
  std::string source_path;
  std::string source_hash;          // sha256 of the original bytes
  std::vector<std::string> lines;   // raw lines without '\n'
  bool trailing_newline = false;
  std::vector<IrUnit> units;
  std::vector<IrComment> comments;
  std::vector<IrCase> cases;

  bool parse_failed = false;        // degraded extraction was used
  std::optional<ParseError> parse_error;
  bool lossy_utf8 = false;          // invalid UTF-8 was replaced

  /// Re-joins `lines`; equals the parsed bytes unless lossy_utf8 is set.
  std::string text() const;

  friend bool operator==(const IrScript&, const IrScript&) = default;
};

/// Lowercase, strip quotes, strip a leading '$' or ':', keep only the last
/// `.`, `::` or `['...']` segment.
std::string normalize_key(std::string_view key_raw);

/// Applies the interpolation-marker rule for `lang`, then the Empty rule.
/// `value` is the already-unquoted scalar text.
ValueKind classify_value(std::string_view value, IacLanguage lang);

IrAttribute make_attribute(std::string key_raw, std::string value,
                           IacLanguage lang, Span span);

/// Splits on '\n'. A trailing '\r' stays part of its line.
std::vector<std::string> split_lines(std::string_view text,
                                     bool* trailing_newline = nullptr);

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns true when anything
/// was replaced.
bool sanitize_utf8(std::string& text);

/// True when a comment body starts the annotation grammar.
bool is_annotation_text(std::string_view comment_text);

}  // namespace iacsmell
