#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iacsmell/ir.hpp"

namespace iacsmell::detail {

struct YamlComment {
  int line = 0;  // 1-based
  int col = 0;   // 1-based column of '#'
  std::string text;
};

struct YamlScalar {
  int line = 0;
  std::string text;
};

/// Lexical pass over YAML text. yaml-cpp drops comments and tolerates an
/// unterminated quoted scalar at end of input, so both are recovered here.
struct YamlScan {
  std::vector<YamlComment> comments;
  std::vector<YamlScalar> scalars;   // quoted and block-context plain scalars
  std::vector<bool> inside_scalar;   // line starts inside a quoted/block scalar
  std::optional<ParseError> error;   // unterminated quote or open flow
};

YamlScan scan_yaml(const std::vector<std::string>& lines);

/// Checks `{{ }}` and `{% %}` pairing inside one scalar. Returns a reason on
/// failure.
std::optional<std::string> check_jinja_delimiters(const std::string& scalar);

}  // namespace iacsmell::detail
