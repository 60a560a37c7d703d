#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iacsmell/ir.hpp"

namespace iacsmell::detail {

enum class PuppetTok { Word, Variable, String, Number, Regex, Op, Comment };

struct PuppetToken {
  PuppetTok kind = PuppetTok::Op;
  std::string text;   // source text
  std::string value;  // String: contents; Comment: body
  int line = 1;
  int end_line = 1;
  int col = 1;
  bool space_before = false;
};

struct PuppetLex {
  std::vector<PuppetToken> tokens;
  std::optional<ParseError> error;
};

/// Tokenizes Puppet DSL: strings with ${} interpolation, heredocs, `#` and
/// `/* */` comments, $variables, ::-qualified names and multi-character
/// operators.
PuppetLex lex_puppet(const std::string& src);

}  // namespace iacsmell::detail
