#include "yaml_scan.hpp"

#include <string_view>

namespace iacsmell::detail {
namespace {

enum class Mode { Normal, Double, Single, Block };

bool is_blank(char c) { return c == ' ' || c == '\t'; }

int indent_of(std::string_view s) {
  int n = 0;
  while (static_cast<std::size_t>(n) < s.size() && s[n] == ' ') ++n;
  return n;
}

}  // namespace

YamlScan scan_yaml(const std::vector<std::string>& lines) {
  YamlScan out;
  out.inside_scalar.assign(lines.size(), false);

  Mode mode = Mode::Normal;
  int block_parent_indent = 0;
  int flow_depth = 0;
  int quote_line = 0;
  std::string quoted;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string_view s = lines[li];
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    const int line_no = static_cast<int>(li) + 1;

    if (mode == Mode::Block) {
      bool blank = s.find_first_not_of(" \t") == std::string_view::npos;
      if (blank || indent_of(s) > block_parent_indent) {
        out.inside_scalar[li] = true;
        continue;
      }
      mode = Mode::Normal;
    }
    if (mode == Mode::Double || mode == Mode::Single) {
      out.inside_scalar[li] = true;
    }

    std::size_t i = 0;
    bool expecting = true;
    bool pending_block = false;
    const int line_indent = indent_of(s);

    if (mode == Mode::Normal) {
      if (!s.empty() && s[0] == '%') continue;
      if ((s.starts_with("---") || s.starts_with("...")) &&
          (s.size() == 3 || is_blank(s[3]))) {
        i = 3;
      }
    }

    while (i < s.size()) {
      char c = s[i];
      if (mode == Mode::Double) {
        if (c == '\\' && i + 1 < s.size()) {
          quoted.push_back(s[i + 1]);
          i += 2;
          continue;
        }
        if (c == '"') {
          out.scalars.push_back({quote_line, quoted});
          mode = Mode::Normal;
          expecting = false;
          ++i;
          continue;
        }
        quoted.push_back(c);
        ++i;
        continue;
      }
      if (mode == Mode::Single) {
        if (c == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            quoted.push_back('\'');
            i += 2;
            continue;
          }
          out.scalars.push_back({quote_line, quoted});
          mode = Mode::Normal;
          expecting = false;
          ++i;
          continue;
        }
        quoted.push_back(c);
        ++i;
        continue;
      }

      if (is_blank(c)) {
        ++i;
        continue;
      }
      if (c == '#' && (i == 0 || is_blank(s[i - 1]))) {
        out.comments.push_back(
            {line_no, static_cast<int>(i) + 1, std::string(s.substr(i + 1))});
        break;
      }
      const bool next_blank = i + 1 >= s.size() || is_blank(s[i + 1]);
      if (expecting && (c == '"' || c == '\'')) {
        mode = c == '"' ? Mode::Double : Mode::Single;
        quote_line = line_no;
        quoted.clear();
        ++i;
        continue;
      }
      if (expecting && flow_depth == 0 && (c == '|' || c == '>')) {
        pending_block = true;
        ++i;
        while (i < s.size() && !is_blank(s[i]) && s[i] != '#') ++i;
        continue;
      }
      if ((c == '-' || c == '?') && next_blank && expecting) {
        ++i;
        continue;
      }
      if (c == '[' || c == '{') {
        ++flow_depth;
        expecting = true;
        ++i;
        continue;
      }
      if (c == ']' || c == '}') {
        if (flow_depth > 0) --flow_depth;
        expecting = false;
        ++i;
        continue;
      }
      if (c == ',' && flow_depth > 0) {
        expecting = true;
        ++i;
        continue;
      }
      if (c == ':' && (next_blank || (flow_depth > 0 &&
                                      std::string_view(",[]{}").find(
                                          s[i + 1]) != std::string_view::npos))) {
        expecting = true;
        ++i;
        continue;
      }
      if (expecting && (c == '&' || c == '!')) {
        while (i < s.size() && !is_blank(s[i])) ++i;
        continue;
      }

      // Plain scalar (or trailing junk after a closed quoted scalar).
      std::size_t j = i;
      while (j < s.size()) {
        char d = s[j];
        if (d == ':' && (j + 1 >= s.size() || is_blank(s[j + 1]) ||
                         (flow_depth > 0 && std::string_view(",[]{}").find(
                                                s[j + 1]) !=
                                                std::string_view::npos))) {
          break;
        }
        if (flow_depth > 0 && std::string_view(",[]{}").find(d) !=
                                  std::string_view::npos) {
          break;
        }
        if (d == '#' && j > i && is_blank(s[j - 1])) break;
        ++j;
      }
      if (expecting && flow_depth == 0) {
        std::string_view plain = s.substr(i, j - i);
        while (!plain.empty() && is_blank(plain.back())) plain.remove_suffix(1);
        out.scalars.push_back({line_no, std::string(plain)});
      }
      expecting = false;
      i = j;
    }

    if (mode == Mode::Double || mode == Mode::Single) {
      quoted.push_back('\n');
    } else if (pending_block) {
      mode = Mode::Block;
      block_parent_indent = line_indent;
    }
  }

  if (mode == Mode::Double || mode == Mode::Single) {
    out.error = ParseError{quote_line, mode == Mode::Double
                                           ? "unterminated double-quoted scalar"
                                           : "unterminated single-quoted scalar"};
  } else if (flow_depth > 0) {
    out.error = ParseError{static_cast<int>(lines.size()),
                           "unclosed flow collection"};
  }
  return out;
}

std::optional<std::string> check_jinja_delimiters(const std::string& s) {
  std::vector<char> stack;
  for (std::size_t i = 0; i + 1 < s.size();) {
    std::string_view two(s.data() + i, 2);
    if (two == "{{" || two == "{%" || two == "{#") {
      stack.push_back(two[1]);
      i += 2;
    } else if (two == "}}" || two == "%}" || two == "#}") {
      char want = two == "}}" ? '{' : two[0];
      if (stack.empty() || stack.back() != want) {
        return "unbalanced template delimiter '" + std::string(two) + "'";
      }
      stack.pop_back();
      i += 2;
    } else {
      ++i;
    }
  }
  if (!stack.empty()) return "unclosed template expression";
  return std::nullopt;
}

}  // namespace iacsmell::detail
