#include "ruby_lex.hpp"

#include <cctype>
#include <set>

namespace iacsmell::detail {
namespace {

const std::set<std::string> kKeywords = {
    "alias", "and",    "begin", "break",  "case",   "class",  "def",
    "defined?", "do",  "else",  "elsif",  "end",    "ensure", "false",
    "for",   "if",     "in",    "module", "next",   "nil",    "not",
    "or",    "redo",   "rescue", "retry", "return", "self",   "super",
    "then",  "true",   "undef", "unless", "until",  "when",   "while",
    "yield"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_char(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

char closing_for(char open) {
  switch (open) {
    case '(': return ')';
    case '[': return ']';
    case '{': return '}';
    case '<': return '>';
    default: return open;
  }
}

struct PendingHeredoc {
  std::size_t token_index;
  std::string id;
  bool squiggly_or_dash;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  RubyLex run() {
    bool at_line_start = true;
    while (i_ < s_.size() && !out_.error) {
      char c = s_[i_];
      if (at_line_start) {
        at_line_start = false;
        if (s_.compare(i_, 6, "=begin") == 0) {
          skip_embedded_doc();
          continue;
        }
        if (s_.compare(i_, 7, "__END__") == 0 &&
            (i_ + 7 == s_.size() || s_[i_ + 7] == '\n' || s_[i_ + 7] == '\r')) {
          break;
        }
      }
      if (c == '\n') {
        push(RubyTok::Newline, "\n", i_, i_ + 1);
        ++i_;
        newline();
        at_line_start = true;
        read_heredoc_bodies();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++i_;
        space_ = true;
        continue;
      }
      if (c == '\\' && i_ + 1 < s_.size() &&
          (s_[i_ + 1] == '\n' || s_[i_ + 1] == '\r')) {
        // explicit line continuation
        i_ += (s_[i_ + 1] == '\r' && i_ + 2 < s_.size() && s_[i_ + 2] == '\n') ? 3 : 2;
        newline();
        space_ = true;
        continue;
      }
      if (c == '#') {
        std::size_t end = s_.find('\n', i_);
        if (end == std::string::npos) end = s_.size();
        std::size_t stop = end;
        if (stop > i_ && s_[stop - 1] == '\r') --stop;
        RubyToken& t = push(RubyTok::Comment, s_.substr(i_, stop - i_), i_, stop);
        t.value = s_.substr(i_ + 1, stop - i_ - 1);
        i_ = end;
        continue;
      }
      if (c == ';') {
        push(RubyTok::Newline, ";", i_, i_ + 1);
        ++i_;
        continue;
      }
      if (c == '"' || c == '`') {
        lex_quoted(c, c, true, 0);
        continue;
      }
      if (c == '\'') {
        lex_quoted('\'', '\'', false, 0);
        continue;
      }
      if (c == '%' && try_percent_literal()) continue;
      if (c == '/' && regex_allowed()) {
        lex_quoted('/', '/', true, 0, RubyTok::Regex);
        continue;
      }
      if (c == '<' && try_heredoc()) continue;
      if (c == ':' && i_ + 1 < s_.size() && s_[i_ + 1] != ':' &&
          (!prev_is_value() || space_)) {
        if (lex_symbol()) continue;
      }
      if (c == '@' || c == '$' || ident_start(c)) {
        lex_ident();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number();
        continue;
      }
      lex_op();
    }
    if (!out_.error && !pending_.empty()) {
      fail(out_.tokens[pending_.front().token_index].line,
           "unterminated heredoc " + pending_.front().id);
    }
    return std::move(out_);
  }

 private:
  void newline() {
    ++line_;
    line_start_ = i_;
  }

  RubyToken& push(RubyTok kind, std::string text, std::size_t begin,
                  std::size_t /*end*/) {
    RubyToken t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = tok_line_ ? tok_line_ : line_;
    t.end_line = line_;
    t.col = static_cast<int>(begin - (tok_line_ ? tok_line_start_ : line_start_)) + 1;
    t.space_before = space_;
    space_ = false;
    tok_line_ = 0;
    out_.tokens.push_back(std::move(t));
    return out_.tokens.back();
  }

  void mark_start() {
    tok_line_ = line_;
    tok_line_start_ = line_start_;
  }

  void fail(int line, std::string reason) {
    if (!out_.error) out_.error = ParseError{line, std::move(reason)};
  }

  bool prev_is_value() const {
    for (auto it = out_.tokens.rbegin(); it != out_.tokens.rend(); ++it) {
      if (it->kind == RubyTok::Comment) continue;
      switch (it->kind) {
        case RubyTok::Ident:
          return !ruby_is_keyword(it->text) || it->text == "end" ||
                 it->text == "self" || it->text == "true" ||
                 it->text == "false" || it->text == "nil";
        case RubyTok::Number:
        case RubyTok::String:
        case RubyTok::Symbol:
        case RubyTok::Regex:
          return true;
        case RubyTok::Op:
          return it->text == ")" || it->text == "]" || it->text == "}";
        default:
          return false;
      }
    }
    return false;
  }

  bool prev_is_plain_ident() const {
    for (auto it = out_.tokens.rbegin(); it != out_.tokens.rend(); ++it) {
      if (it->kind == RubyTok::Comment) continue;
      return it->kind == RubyTok::Ident && !ruby_is_keyword(it->text);
    }
    return false;
  }

  bool regex_allowed() const {
    if (!prev_is_value()) return true;
    // `split /,/` : identifier, space, then no space after the slash
    char next = i_ + 1 < s_.size() ? s_[i_ + 1] : ' ';
    return prev_is_plain_ident() && space_ && next != ' ' && next != '=';
  }

  void skip_embedded_doc() {
    const int start_line = line_;
    while (i_ < s_.size()) {
      std::size_t end = s_.find('\n', i_);
      bool is_end = s_.compare(i_, 4, "=end") == 0;
      if (end == std::string::npos) {
        i_ = s_.size();
        if (!is_end) fail(start_line, "unterminated =begin block");
        return;
      }
      i_ = end + 1;
      newline();
      if (is_end) return;
    }
    fail(start_line, "unterminated =begin block");
  }

  // Reads a delimited literal starting at s_[i_] == open.
  void lex_quoted(char open, char close, bool interpolates, std::size_t prefix_len,
                  RubyTok kind = RubyTok::String) {
    mark_start();
    const int start_line = line_;
    const std::size_t begin = i_ - prefix_len;
    std::size_t j = i_ + 1;
    int nest = 0;
    std::string value;
    while (j < s_.size()) {
      char c = s_[j];
      if (c == '\\' && j + 1 < s_.size()) {
        if (s_[j + 1] == '\n') {
          ++j;
          value.push_back('\\');
          continue;
        }
        value.push_back(c);
        value.push_back(s_[j + 1]);
        j += 2;
        continue;
      }
      if (c == '\n') {
        value.push_back(c);
        ++j;
        i_ = j;
        newline();
        continue;
      }
      if (interpolates && c == '#' && j + 1 < s_.size() && s_[j + 1] == '{') {
        std::size_t k = skip_interpolation(j + 2);
        if (k == std::string::npos) {
          fail(start_line, "unterminated interpolation");
          i_ = s_.size();
          return;
        }
        value.append(s_, j, k - j);
        j = k;
        continue;
      }
      if (open != close && c == open) {
        ++nest;
      } else if (c == close) {
        if (nest == 0) break;
        --nest;
      }
      value.push_back(c);
      ++j;
    }
    if (j >= s_.size()) {
      fail(start_line, std::string("unterminated ") +
                           (kind == RubyTok::Regex ? "regex" : "string") +
                           " literal");
      i_ = s_.size();
      return;
    }
    ++j;  // closing delimiter
    if (kind == RubyTok::Regex) {
      while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) ++j;
    }
    i_ = j;
    RubyToken& t = push(kind, s_.substr(begin, j - begin), begin, j);
    t.value = std::move(value);
  }

  // Returns the index just past the closing '}' of an interpolation body that
  // starts at `j`, tracking line breaks.
  std::size_t skip_interpolation(std::size_t j) {
    int depth = 1;
    while (j < s_.size()) {
      char c = s_[j];
      if (c == '\n') {
        ++j;
        i_ = j;
        newline();
        continue;
      }
      if (c == '"' || c == '\'') {
        char q = c;
        ++j;
        while (j < s_.size() && s_[j] != q) {
          if (s_[j] == '\\') ++j;
          if (j < s_.size() && s_[j] == '\n') {
            i_ = j + 1;
            newline();
          }
          ++j;
        }
        if (j >= s_.size()) return std::string::npos;
        ++j;
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) return j + 1;
      ++j;
    }
    return std::string::npos;
  }

  bool try_percent_literal() {
    if (prev_is_value() && !(prev_is_plain_ident() && space_)) return false;
    std::size_t j = i_ + 1;
    char type = 'Q';
    if (j < s_.size() && std::string_view("wWiIqQrsx").find(s_[j]) != std::string_view::npos) {
      type = s_[j];
      ++j;
    }
    if (j >= s_.size()) return false;
    char open = s_[j];
    if (std::string_view("([{<|!/^").find(open) == std::string_view::npos) return false;
    if (prev_is_plain_ident() && space_ && j + 1 < s_.size() && s_[j + 1] == ' ' &&
        type == 'Q') {
      return false;  // `x % (y)` arithmetic
    }
    bool interp = type == 'Q' || type == 'W' || type == 'I' || type == 'r' || type == 'x';
    std::size_t prefix = j - i_;
    i_ = j;
    lex_quoted(open, closing_for(open), interp, prefix,
               type == 'r' ? RubyTok::Regex : RubyTok::String);
    return true;
  }

  bool try_heredoc() {
    if (s_.compare(i_, 2, "<<") != 0) return false;
    std::size_t j = i_ + 2;
    bool flag = false;
    if (j < s_.size() && (s_[j] == '~' || s_[j] == '-')) {
      flag = true;
      ++j;
    }
    char quote = 0;
    if (j < s_.size() && (s_[j] == '\'' || s_[j] == '"' || s_[j] == '`')) {
      quote = s_[j];
      ++j;
    }
    std::size_t id_begin = j;
    while (j < s_.size() && ident_char(s_[j])) ++j;
    if (j == id_begin) return false;
    std::string id = s_.substr(id_begin, j - id_begin);
    if (quote) {
      if (j >= s_.size() || s_[j] != quote) return false;
      ++j;
    }
    if (!flag && !quote) {
      bool upper = std::isupper(static_cast<unsigned char>(id[0]));
      if (!upper || (prev_is_value() && !(prev_is_plain_ident() && space_))) {
        return false;
      }
    }
    mark_start();
    std::size_t begin = i_;
    i_ = j;
    push(RubyTok::String, s_.substr(begin, j - begin), begin, j);
    pending_.push_back({out_.tokens.size() - 1, id, flag});
    return true;
  }

  void read_heredoc_bodies() {
    while (!pending_.empty()) {
      PendingHeredoc h = pending_.front();
      pending_.erase(pending_.begin());
      std::string body;
      bool closed = false;
      while (i_ < s_.size()) {
        std::size_t end = s_.find('\n', i_);
        std::size_t stop = end == std::string::npos ? s_.size() : end;
        std::string_view line(s_.data() + i_, stop - i_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::string_view cmp = line;
        if (h.squiggly_or_dash) {
          while (!cmp.empty() && (cmp.front() == ' ' || cmp.front() == '\t')) {
            cmp.remove_prefix(1);
          }
        }
        i_ = end == std::string::npos ? s_.size() : end + 1;
        if (end != std::string::npos) newline();
        if (cmp == h.id) {
          closed = true;
          break;
        }
        body.append(line);
        body.push_back('\n');
      }
      RubyToken& t = out_.tokens[h.token_index];
      t.value = std::move(body);
      t.end_line = line_ - 1;
      if (!closed) {
        fail(t.line, "unterminated heredoc " + h.id);
        return;
      }
    }
  }

  bool lex_symbol() {
    std::size_t j = i_ + 1;
    if (s_[j] == '"' || s_[j] == '\'') {
      ++i_;
      lex_quoted(s_[i_], s_[i_], s_[i_] == '"', 1, RubyTok::Symbol);
      return true;
    }
    if (!ident_start(s_[j]) && s_[j] != '@' && s_[j] != '$') return false;
    while (j < s_.size() && (ident_char(s_[j]) || s_[j] == '@' || s_[j] == '$')) ++j;
    if (j < s_.size() && (s_[j] == '?' || s_[j] == '!' || s_[j] == '=') &&
        !(j + 1 < s_.size() && (s_[j + 1] == '=' || s_[j + 1] == '>'))) {
      ++j;
    }
    std::size_t begin = i_;
    i_ = j;
    RubyToken& t = push(RubyTok::Symbol, s_.substr(begin, j - begin), begin, j);
    t.value = t.text.substr(1);
    return true;
  }

  void lex_ident() {
    std::size_t begin = i_;
    std::size_t j = i_;
    while (j < s_.size() && (s_[j] == '@' || s_[j] == '$')) ++j;
    while (j < s_.size() && ident_char(s_[j])) ++j;
    if (j == begin + 1 && (s_[begin] == '$')) {
      // $0, $!, $: ... special globals
      if (j < s_.size()) ++j;
    }
    if (j < s_.size() && (s_[j] == '?' || s_[j] == '!') &&
        !(j + 1 < s_.size() && s_[j + 1] == '=')) {
      ++j;
    }
    // label `key:` but not `Foo::Bar` and not ternary `a ? b : c`
    if (j < s_.size() && s_[j] == ':' &&
        (j + 1 >= s_.size() || s_[j + 1] != ':') && s_[begin] != '@' &&
        s_[begin] != '$') {
      i_ = j + 1;
      RubyToken& t = push(RubyTok::Label, s_.substr(begin, j + 1 - begin), begin, j + 1);
      t.value = s_.substr(begin, j - begin);
      return;
    }
    i_ = j;
    push(RubyTok::Ident, s_.substr(begin, j - begin), begin, j);
  }

  void lex_number() {
    std::size_t begin = i_;
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j + 1 < s_.size() && s_[j] == '.' && std::isdigit(static_cast<unsigned char>(s_[j + 1]))) {
      ++j;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    }
    i_ = j;
    push(RubyTok::Number, s_.substr(begin, j - begin), begin, j);
  }

  void lex_op() {
    static const char* kOps[] = {"**=", "<=>", "===", "...", "<<=", ">>=", "&&=",
                                 "||=", "&.",  "=>",  "==",  "!=",  ">=",  "<=",
                                 "&&",  "||",  "<<",  ">>",  "**",  "::",  "..",
                                 "+=",  "-=",  "*=",  "/=",  "%=",  "|=",  "&=",
                                 "=~",  "!~",  "->"};
    std::size_t begin = i_;
    for (const char* op : kOps) {
      std::size_t n = std::char_traits<char>::length(op);
      if (s_.compare(i_, n, op) == 0) {
        i_ += n;
        push(RubyTok::Op, op, begin, i_);
        return;
      }
    }
    ++i_;
    push(RubyTok::Op, std::string(1, s_[begin]), begin, i_);
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  int tok_line_ = 0;
  std::size_t tok_line_start_ = 0;
  bool space_ = false;
  std::vector<PendingHeredoc> pending_;
  RubyLex out_;
};

}  // namespace

bool ruby_is_keyword(const std::string& word) { return kKeywords.contains(word); }

RubyLex lex_ruby(const std::string& src) { return Lexer(src).run(); }

}  // namespace iacsmell::detail
