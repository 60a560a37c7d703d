#include <algorithm>
#include <regex>
#include <set>

#include "iacsmell/digest.hpp"
#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"
#include "parse_common.hpp"

namespace iacsmell {
namespace detail {

IrScript start_script(IacLanguage lang, std::string_view content,
                      std::string_view path) {
  IrScript script;
  script.language = lang;
  script.source_path = std::string(path);
  script.source_hash = sha256_hex(content);
  std::string text(content);
  script.lossy_utf8 = sanitize_utf8(text);
  script.lines = split_lines(text, &script.trailing_newline);
  return script;
}

namespace {

void clamp(Span& span, int line_count) {
  if (line_count <= 0) {
    span = Span{1, 1, 0};
    return;
  }
  span.start_line = std::clamp(span.start_line, 1, line_count);
  span.end_line = std::clamp(span.end_line, span.start_line, line_count);
  if (span.start_col < 0) span.start_col = 0;
}

bool by_position(const Span& a, const Span& b) {
  if (a.start_line != b.start_line) return a.start_line < b.start_line;
  return a.start_col < b.start_col;
}

}  // namespace

void finish_script(IrScript& script) {
  const int n = static_cast<int>(script.lines.size());
  for (auto& unit : script.units) {
    clamp(unit.span, n);
    for (auto& attr : unit.attributes) clamp(attr.span, n);
    std::stable_sort(unit.attributes.begin(), unit.attributes.end(),
                     [](const IrAttribute& a, const IrAttribute& b) {
                       return by_position(a.span, b.span);
                     });
  }
  std::stable_sort(script.units.begin(), script.units.end(),
                   [](const IrUnit& a, const IrUnit& b) {
                     return by_position(a.span, b.span);
                   });
  for (auto& c : script.comments) {
    clamp(c.span, n);
    c.is_annotation = is_annotation_text(c.text);
  }
  std::stable_sort(script.comments.begin(), script.comments.end(),
                   [](const IrComment& a, const IrComment& b) {
                     return by_position(a.span, b.span);
                   });
  for (auto& c : script.cases) clamp(c.span, n);
  std::stable_sort(script.cases.begin(), script.cases.end(),
                   [](const IrCase& a, const IrCase& b) {
                     return by_position(a.span, b.span);
                   });
}

IrComment make_comment(std::string_view body, int line, int col) {
  IrComment c;
  std::string_view t = body;
  if (!t.empty() && t.back() == '\r') t.remove_suffix(1);
  c.text = std::string(text::rtrim(text::ltrim(t)));
  c.span = Span{line, line, col};
  c.is_annotation = is_annotation_text(c.text);
  return c;
}

namespace {

// Position of the first '#' outside quotes, or npos.
std::size_t comment_start(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '#' && !(i + 1 < line.size() && line[i + 1] == '{')) return i;
  }
  return std::string_view::npos;
}

const std::set<std::string, std::less<>> kStructuralWords = {
    "if", "elsif", "else", "unless", "case", "when", "in", "end", "do",
    "while", "until", "for", "begin", "rescue", "ensure", "def", "class",
    "module", "define", "node", "default", "return", "include", "require",
    "contain", "and", "or", "not", "then"};

}  // namespace

void extract_lines(IrScript& script, int from_line) {
  static const std::regex rocket(
      R"re(^\s*(["']?[$@:]?[\w.:\[\]'"-]+["']?)\s*(=>|=|:)\s*(\S.*?)\s*$)re");
  static const std::regex command(R"(^\s*([a-z_]\w*)\s+(\S.*?)\s*$)");
  IrUnit unit{"degraded", "", {}, Span{std::max(from_line, 1), std::max(from_line, 1), 0}};
  const int n = static_cast<int>(script.lines.size());
  for (int li = std::max(from_line, 1); li <= n; ++li) {
    std::string line = script.lines[li - 1];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = comment_start(line);
    if (hash != std::string::npos) {
      script.comments.push_back(make_comment(std::string_view(line).substr(hash + 1), li,
                                             static_cast<int>(hash) + 1));
      line.resize(hash);
    }
    std::smatch m;
    std::string key, value;
    if (std::regex_match(line, m, rocket) && m[1].str().find("::") != 0) {
      key = m[1].str();
      value = m[3].str();
    } else if (std::regex_match(line, m, command) &&
               !kStructuralWords.contains(m[1].str())) {
      key = m[1].str();
      value = m[2].str();
    } else {
      continue;
    }
    std::string_view v = text::trim(value);
    while (!v.empty() && (v.back() == ',' || v.back() == ';')) v = text::rtrim(v.substr(0, v.size() - 1));
    if (v.ends_with(" do") || v == "do" || v.ends_with("{") || v.ends_with("|")) continue;
    int col = static_cast<int>(text::indentation(line).size()) + 1;
    unit.attributes.push_back(make_attribute(std::string(text::unquote(text::trim(key))),
                                             std::string(text::unquote(v)),
                                             script.language, Span{li, li, col}));
    unit.span.end_line = li;
  }
  if (!unit.attributes.empty()) {
    unit.span.start_line = unit.attributes.front().span.start_line;
    script.units.push_back(std::move(unit));
  }
}

}  // namespace detail

IrScript parse_as(IacLanguage lang, std::string_view content,
                  std::string_view path) {
  switch (lang) {
    case IacLanguage::Ansible: return parse_ansible(content, path);
    case IacLanguage::Chef: return parse_chef(content, path);
    case IacLanguage::Puppet: return parse_puppet(content, path);
  }
  return parse_ansible(content, path);
}

IrScript parse_any(std::string_view content, std::string_view path) {
  return parse_as(infer_language(path, content), content, path);
}

}  // namespace iacsmell
