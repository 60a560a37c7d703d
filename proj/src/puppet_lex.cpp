#include "puppet_lex.hpp"

#include <cctype>
#include <regex>

namespace iacsmell::detail {
namespace {

bool word_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  PuppetLex run() {
    while (i_ < s_.size() && !out_.error) {
      char c = s_[i_];
      if (c == '\n') {
        ++i_;
        newline();
        read_heredoc_bodies();
        space_ = true;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++i_;
        space_ = true;
        continue;
      }
      if (c == '#') {
        std::size_t end = s_.find('\n', i_);
        if (end == std::string::npos) end = s_.size();
        std::size_t stop = end;
        if (stop > i_ && s_[stop - 1] == '\r') --stop;
        PuppetToken& t = push(PuppetTok::Comment, s_.substr(i_, stop - i_), i_);
        t.value = s_.substr(i_ + 1, stop - i_ - 1);
        i_ = end;
        continue;
      }
      if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '*') {
        block_comment();
        continue;
      }
      if (c == '"' || c == '\'') {
        quoted(c);
        continue;
      }
      if (c == '@' && i_ + 1 < s_.size() && s_[i_ + 1] == '(') {
        if (heredoc()) continue;
      }
      if (c == '/' && regex_allowed()) {
        regex();
        continue;
      }
      if (c == '$') {
        variable();
        continue;
      }
      if (word_start(c) || (c == ':' && i_ + 2 < s_.size() && s_[i_ + 1] == ':' &&
                            word_start(s_[i_ + 2]))) {
        word();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        number();
        continue;
      }
      op();
    }
    if (!out_.error && !pending_.empty()) {
      fail(out_.tokens[pending_.front().index].line, "unterminated heredoc");
    }
    return std::move(out_);
  }

 private:
  struct Pending {
    std::size_t index;
    std::string tag;
  };

  void newline() {
    ++line_;
    line_start_ = i_;
  }

  void fail(int line, std::string reason) {
    if (!out_.error) out_.error = ParseError{line, std::move(reason)};
  }

  PuppetToken& push(PuppetTok kind, std::string text, std::size_t begin,
                    int start_line = 0, std::size_t start_line_begin = 0) {
    PuppetToken t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = start_line ? start_line : line_;
    t.end_line = line_;
    t.col = static_cast<int>(begin - (start_line ? start_line_begin : line_start_)) + 1;
    t.space_before = space_;
    space_ = false;
    out_.tokens.push_back(std::move(t));
    return out_.tokens.back();
  }

  bool regex_allowed() const {
    for (auto it = out_.tokens.rbegin(); it != out_.tokens.rend(); ++it) {
      if (it->kind == PuppetTok::Comment) continue;
      if (it->kind == PuppetTok::Word) return it->text == "node";
      if (it->kind != PuppetTok::Op) return false;
      return it->text == "=~" || it->text == "!~" || it->text == "," ||
             it->text == "{" || it->text == "(" || it->text == "[" ||
             it->text == ";" || it->text == "}";
    }
    return true;
  }

  void block_comment() {
    const int start_line = line_;
    const std::size_t start_begin = line_start_;
    const std::size_t begin = i_;
    std::size_t j = i_ + 2;
    while (j + 1 < s_.size() && !(s_[j] == '*' && s_[j + 1] == '/')) {
      if (s_[j] == '\n') {
        i_ = j + 1;
        newline();
      }
      ++j;
    }
    if (j + 1 >= s_.size()) {
      fail(start_line, "unterminated block comment");
      i_ = s_.size();
      return;
    }
    i_ = j + 2;
    PuppetToken& t = push(PuppetTok::Comment, s_.substr(begin, i_ - begin), begin,
                          start_line, start_begin);
    t.value = s_.substr(begin + 2, j - begin - 2);
  }

  void quoted(char q) {
    const int start_line = line_;
    const std::size_t start_begin = line_start_;
    const std::size_t begin = i_;
    std::size_t j = i_ + 1;
    std::string value;
    int interp = 0;
    while (j < s_.size()) {
      char c = s_[j];
      if (c == '\\' && j + 1 < s_.size()) {
        value.push_back(c);
        value.push_back(s_[j + 1]);
        if (s_[j + 1] == '\n') {
          i_ = j + 2;
          newline();
        }
        j += 2;
        continue;
      }
      if (c == '\n') {
        i_ = j + 1;
        newline();
      }
      if (q == '"' && c == '$' && j + 1 < s_.size() && s_[j + 1] == '{') {
        ++interp;
        value.append("${");
        j += 2;
        continue;
      }
      if (interp > 0 && c == '}') --interp;
      if (c == q && interp == 0) break;
      value.push_back(c);
      ++j;
    }
    if (j >= s_.size()) {
      fail(start_line, "unterminated string literal");
      i_ = s_.size();
      return;
    }
    i_ = j + 1;
    PuppetToken& t = push(PuppetTok::String, s_.substr(begin, i_ - begin), begin,
                          start_line, start_begin);
    t.value = std::move(value);
  }

  bool heredoc() {
    static const std::regex head(R"re(^@\(\s*"?([^"):/\s]+)"?\s*(?::\s*\w+)?\s*(?:/[\w$]*)?\s*\))re");
    std::size_t end = s_.find('\n', i_);
    std::string rest = s_.substr(i_, (end == std::string::npos ? s_.size() : end) - i_);
    std::smatch m;
    if (!std::regex_search(rest, m, head)) return false;
    const std::size_t begin = i_;
    i_ += m.length(0);
    push(PuppetTok::String, s_.substr(begin, i_ - begin), begin);
    pending_.push_back({out_.tokens.size() - 1, m[1].str()});
    return true;
  }

  void read_heredoc_bodies() {
    static const std::regex close_re(R"(^\s*\|?\s*-?\s*(\S+)\s*$)");
    while (!pending_.empty()) {
      Pending p = pending_.front();
      pending_.erase(pending_.begin());
      std::string body;
      bool closed = false;
      while (i_ < s_.size()) {
        std::size_t end = s_.find('\n', i_);
        std::size_t stop = end == std::string::npos ? s_.size() : end;
        std::string line = s_.substr(i_, stop - i_);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        i_ = end == std::string::npos ? s_.size() : end + 1;
        if (end != std::string::npos) newline();
        std::smatch m;
        if (std::regex_match(line, m, close_re) && m[1].str() == p.tag &&
            line.find('|') != std::string::npos) {
          closed = true;
          break;
        }
        if (std::regex_match(line, m, close_re) && m[1].str() == p.tag) {
          closed = true;
          break;
        }
        body += line;
        body.push_back('\n');
      }
      PuppetToken& t = out_.tokens[p.index];
      t.value = std::move(body);
      t.end_line = line_ - 1;
      if (!closed) {
        fail(t.line, "unterminated heredoc");
        return;
      }
    }
  }

  void regex() {
    const std::size_t begin = i_;
    std::size_t j = i_ + 1;
    while (j < s_.size() && s_[j] != '/' && s_[j] != '\n') {
      if (s_[j] == '\\') ++j;
      ++j;
    }
    if (j >= s_.size() || s_[j] != '/') {
      ++i_;
      push(PuppetTok::Op, "/", begin);
      return;
    }
    i_ = j + 1;
    PuppetToken& t = push(PuppetTok::Regex, s_.substr(begin, i_ - begin), begin);
    t.value = s_.substr(begin + 1, j - begin - 1);
  }

  void variable() {
    const std::size_t begin = i_;
    std::size_t j = i_ + 1;
    if (j < s_.size() && s_[j] == '{') {
      while (j < s_.size() && s_[j] != '}') ++j;
      if (j < s_.size()) ++j;
    } else {
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                               s_[j] == '_' || s_[j] == ':')) {
        if (s_[j] == ':' && !(j + 1 < s_.size() && s_[j + 1] == ':')) break;
        j += s_[j] == ':' ? 2 : 1;
      }
    }
    i_ = j;
    push(PuppetTok::Variable, s_.substr(begin, j - begin), begin);
  }

  void word() {
    const std::size_t begin = i_;
    std::size_t j = i_;
    for (;;) {
      if (j + 1 < s_.size() && s_[j] == ':' && s_[j + 1] == ':') j += 2;
      while (j < s_.size() && word_char(s_[j])) ++j;
      if (j + 2 < s_.size() && s_[j] == ':' && s_[j + 1] == ':' && word_start(s_[j + 2])) {
        continue;
      }
      break;
    }
    i_ = j;
    push(PuppetTok::Word, s_.substr(begin, j - begin), begin);
  }

  void number() {
    const std::size_t begin = i_;
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '.')) ++j;
    i_ = j;
    push(PuppetTok::Number, s_.substr(begin, j - begin), begin);
  }

  void op() {
    static const char* kOps[] = {"<<|", "|>>", "=>", "+>", "->", "~>", "<-", "<~", "==",
                                 "!=", "=~", "!~", ">=", "<=", "<|", "|>", "@@", "<<",
                                 ">>", "::"};
    const std::size_t begin = i_;
    for (const char* o : kOps) {
      std::size_t n = std::char_traits<char>::length(o);
      if (s_.compare(i_, n, o) == 0) {
        i_ += n;
        push(PuppetTok::Op, o, begin);
        return;
      }
    }
    ++i_;
    push(PuppetTok::Op, std::string(1, s_[begin]), begin);
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  bool space_ = false;
  std::vector<Pending> pending_;
  PuppetLex out_;
};

}  // namespace

PuppetLex lex_puppet(const std::string& src) { return Lexer(src).run(); }

}  // namespace iacsmell::detail
