#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iacsmell/ir.hpp"

namespace iacsmell::detail {

enum class RubyTok { Ident, Label, Symbol, String, Number, Regex, Op, Newline, Comment };

struct RubyToken {
  RubyTok kind = RubyTok::Op;
  std::string text;   // source text (String: including delimiters)
  std::string value;  // String: contents; Label: name; Comment: body after '#'
  int line = 1;       // 1-based
  int end_line = 1;
  int col = 1;        // 1-based
  bool space_before = false;
};

struct RubyLex {
  std::vector<RubyToken> tokens;
  std::optional<ParseError> error;  // unterminated literal
};

/// Tokenizes a Ruby source well enough for Chef recipes: strings with
/// interpolation, %-literals, heredocs, symbols, labels, regex literals,
/// comments and =begin/=end blocks. Never throws.
RubyLex lex_ruby(const std::string& src);

bool ruby_is_keyword(const std::string& word);

}  // namespace iacsmell::detail
