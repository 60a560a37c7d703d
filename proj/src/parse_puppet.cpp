#include <algorithm>
#include <cctype>

#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"
#include "parse_common.hpp"
#include "puppet_lex.hpp"

namespace iacsmell {
namespace {

using detail::PuppetTok;
using detail::PuppetToken;

class PuppetParser {
 public:
  PuppetParser(IrScript& script, std::vector<PuppetToken> tokens)
      : script_(script), t_(std::move(tokens)) {}

  void run() {
    statements(std::nullopt, /*top=*/true);
  }

  bool failed() const { return failed_; }

 private:
  const PuppetToken* peek(std::size_t k = 0) const {
    return pos_ + k < t_.size() ? &t_[pos_ + k] : nullptr;
  }
  bool at_op(std::string_view op, std::size_t k = 0) const {
    const PuppetToken* t = peek(k);
    return t && t->kind == PuppetTok::Op && t->text == op;
  }
  bool at_word(std::string_view w, std::size_t k = 0) const {
    const PuppetToken* t = peek(k);
    return t && t->kind == PuppetTok::Word && t->text == w;
  }
  static bool is_open(const PuppetToken& t) {
    return t.kind == PuppetTok::Op && (t.text == "{" || t.text == "[" || t.text == "(");
  }
  static bool is_close(const PuppetToken& t) {
    return t.kind == PuppetTok::Op && (t.text == "}" || t.text == "]" || t.text == ")");
  }

  void fail(int line, std::string reason) {
    failed_ = true;
    if (!script_.parse_error) script_.parse_error = ParseError{line, std::move(reason)};
  }

  int last_line() const {
    return pos_ > 0 && pos_ - 1 < t_.size() ? t_[pos_ - 1].end_line
                                            : static_cast<int>(script_.lines.size());
  }

  // Skips a balanced group starting at an opening bracket.
  void skip_group() {
    int depth = 0;
    const int start = peek() ? peek()->line : 0;
    while (const PuppetToken* t = peek()) {
      if (is_open(*t)) ++depth;
      if (is_close(*t)) --depth;
      ++pos_;
      if (depth == 0) return;
    }
    fail(start, "unbalanced braces");
  }

  IrUnit& container(std::optional<std::size_t> unit) {
    if (unit) return script_.units[*unit];
    if (!bare_) {
      const PuppetToken* t = peek();
      script_.units.push_back(IrUnit{"bare", "", {}, Span{t ? t->line : 1, t ? t->line : 1, 0}});
      bare_ = script_.units.size() - 1;
    }
    return script_.units[*bare_];
  }

  // Parses statements until a closing '}' (consumed) or end of input.
  void statements(std::optional<std::size_t> unit, bool top) {
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && t->text == "}") {
        if (top) {
          fail(t->line, "unbalanced braces: unexpected '}'");
          ++pos_;
          continue;
        }
        ++pos_;
        return;
      }
      statement(unit);
    }
    if (!top) fail(last_line(), "unbalanced braces: missing '}'");
  }

  void body(std::optional<std::size_t> unit) {
    if (!at_op("{")) return;
    ++pos_;
    statements(unit, false);
  }

  void statement(std::optional<std::size_t> unit) {
    const PuppetToken* t = peek();
    if (t->kind == PuppetTok::Word) {
      const std::string& w = t->text;
      if (w == "class" && !at_op("{", 1) && peek(1) && peek(1)->kind == PuppetTok::Word) {
        container_def("class");
        return;
      }
      if (w == "define" || w == "node" || w == "plan" || w == "application" ||
          w == "site") {
        container_def(w);
        return;
      }
      if (w == "case") {
        case_statement(unit);
        return;
      }
      if (w == "if" || w == "unless" || w == "elsif") {
        ++pos_;
        condition_until_brace(unit);
        body(unit);
        return;
      }
      if (w == "else") {
        ++pos_;
        body(unit);
        return;
      }
      if (at_op("{", 1)) {
        resource(w, t->line, t->col, unit);
        return;
      }
      if (at_op("[", 1) && std::isupper(static_cast<unsigned char>(w[0]))) {
        // resource reference, possibly an override block
        ++pos_;
        skip_group();
        if (at_op("{")) resource(w, t->line, t->col, unit);
        return;
      }
      if (at_op("=>", 1) || at_op("+>", 1)) {
        bare_pair(unit);
        return;
      }
      ++pos_;
      return;
    }
    if (t->kind == PuppetTok::Op && (t->text == "@" || t->text == "@@")) {
      ++pos_;
      return;
    }
    if (t->kind == PuppetTok::Variable && at_op("=", 1)) {
      assignment(unit);
      return;
    }
    if (t->kind == PuppetTok::String && at_op(":", 1)) {
      // title fragment without its type: `'title': k => v;`
      IrUnit u{"resource", t->value, {}, Span{t->line, t->line, t->col}};
      script_.units.push_back(std::move(u));
      std::size_t idx = script_.units.size() - 1;
      pos_ += 2;
      attributes(idx);
      if (at_op(";")) ++pos_;
      return;
    }
    if (t->kind == PuppetTok::String && (at_op("=>", 1) || at_op("+>", 1))) {
      bare_pair(unit);
      return;
    }
    if (is_open(*t)) {
      if (t->text == "{") {
        ++pos_;
        statements(unit, false);
      } else {
        skip_group();
      }
      return;
    }
    ++pos_;
  }

  void container_def(const std::string& kind) {
    const PuppetToken* head = peek();
    ++pos_;
    IrUnit u;
    u.kind = kind;
    u.span = Span{head->line, head->line, head->col};
    // name(s)
    std::vector<std::string> names;
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && (t->text == "{" || t->text == "(")) break;
      if (t->kind == PuppetTok::Word && t->text == "inherits") {
        pos_ += 2;
        continue;
      }
      if (t->kind == PuppetTok::Word || t->kind == PuppetTok::String ||
          t->kind == PuppetTok::Regex) {
        names.push_back(t->kind == PuppetTok::String ? t->value : t->text);
      }
      ++pos_;
    }
    u.name = text::join(names, ", ");
    script_.units.push_back(std::move(u));
    const std::size_t idx = script_.units.size() - 1;
    if (at_op("(")) parameters(idx);
    while (peek() && !at_op("{")) {
      if (at_word("inherits")) {
        pos_ += 2;
        continue;
      }
      ++pos_;
    }
    if (!peek()) {
      fail(script_.units[idx].span.start_line, "unbalanced braces: missing body");
      return;
    }
    body(idx);
    script_.units[idx].span.end_line = last_line();
  }

  void parameters(std::size_t idx) {
    ++pos_;  // (
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && t->text == ")") {
        ++pos_;
        return;
      }
      if (t->kind == PuppetTok::Variable && at_op("=", 1)) {
        const PuppetToken* key = t;
        pos_ += 2;
        add_value(script_.units[idx], key, key->text, {",", ")"});
        continue;
      }
      if (is_open(*t)) {
        skip_group();
        continue;
      }
      ++pos_;
    }
    fail(script_.units[idx].span.start_line, "unbalanced parentheses");
  }

  void condition_until_brace(std::optional<std::size_t> unit) {
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && t->text == "{") return;
      if (t->kind == PuppetTok::Op && (t->text == "(" || t->text == "[")) {
        skip_group();
        continue;
      }
      if (t->kind == PuppetTok::Op && t->text == "?" && at_op("{", 1)) {
        selector(unit, t->line);
        continue;
      }
      ++pos_;
    }
  }

  std::string subject_text(std::size_t b, std::size_t e) const {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
      if (i > b && t_[i].space_before) out.push_back(' ');
      out += t_[i].text;
    }
    return out;
  }

  void case_statement(std::optional<std::size_t> unit) {
    const PuppetToken* head = peek();
    ++pos_;
    std::size_t subj_begin = pos_;
    while (peek() && !at_op("{")) {
      if (at_op("(") || at_op("[")) {
        skip_group();
        continue;
      }
      ++pos_;
    }
    IrCase c;
    c.subject = subject_text(subj_begin, pos_);
    c.span = Span{head->line, head->line, head->col};
    script_.cases.push_back(std::move(c));
    const std::size_t ci = script_.cases.size() - 1;
    if (!peek()) {
      fail(head->line, "unbalanced braces: case without body");
      return;
    }
    ++pos_;  // {
    bool is_default = false;
    bool in_matchers = true;
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && t->text == "}") {
        ++pos_;
        script_.cases[ci].span.end_line = t->line;
        return;
      }
      if (in_matchers) {
        if (t->kind == PuppetTok::Word && t->text == "default") is_default = true;
        if (t->kind == PuppetTok::Op && t->text == ":") {
          in_matchers = false;
          ++pos_;
          continue;
        }
        if (t->kind == PuppetTok::Op && (t->text == "[" || t->text == "(")) {
          skip_group();
          continue;
        }
        ++pos_;
        continue;
      }
      if (t->kind == PuppetTok::Op && t->text == "{") {
        if (is_default) {
          script_.cases[ci].has_default = true;
        } else {
          ++script_.cases[ci].branch_count;
        }
        ++pos_;
        statements(unit, false);
        is_default = false;
        in_matchers = true;
        continue;
      }
      ++pos_;
    }
    fail(head->line, "unbalanced braces: case not closed");
    script_.cases[ci].span.end_line = last_line();
  }

  void selector(std::optional<std::size_t> unit, int line) {
    (void)unit;
    ++pos_;  // ?
    IrCase c;
    std::size_t b = pos_;
    // subject: tokens just before '?' on the same line
    std::size_t s = b - 1;
    while (s > 0 && t_[s - 1].line == line && t_[s - 1].kind != PuppetTok::Op) --s;
    c.subject = subject_text(s, b - 1);
    c.span = Span{line, line, 0};
    ++pos_;  // {
    int depth = 1;
    bool key_default = false;
    std::size_t key_start = pos_;
    while (const PuppetToken* t = peek()) {
      if (is_open(*t)) ++depth;
      if (is_close(*t)) {
        if (--depth == 0) {
          c.span.end_line = t->line;
          ++pos_;
          script_.cases.push_back(std::move(c));
          return;
        }
      }
      if (depth == 1 && t->kind == PuppetTok::Op && t->text == "=>") {
        key_default = pos_ > key_start && t_[pos_ - 1].kind == PuppetTok::Word &&
                      t_[pos_ - 1].text == "default";
        if (key_default) {
          c.has_default = true;
        } else {
          ++c.branch_count;
        }
      }
      if (depth == 1 && t->kind == PuppetTok::Op && t->text == ",") key_start = pos_ + 1;
      ++pos_;
    }
    fail(line, "unbalanced braces: selector not closed");
    script_.cases.push_back(std::move(c));
  }

  void resource(const std::string& type, int line, int col,
                std::optional<std::size_t> outer) {
    (void)outer;
    if (peek() && peek()->kind == PuppetTok::Word) ++pos_;
    ++pos_;  // {
    // Type defaults / overrides: attributes directly in the braces.
    bool titled = false;
    {
      int depth = 0;
      for (std::size_t k = pos_; k < t_.size(); ++k) {
        const PuppetToken& t = t_[k];
        if (is_open(t)) ++depth;
        if (is_close(t)) {
          if (depth == 0) break;
          --depth;
        }
        if (depth == 0 && t.kind == PuppetTok::Op && (t.text == "=>" || t.text == "+>")) break;
        if (depth == 0 && t.kind == PuppetTok::Op && t.text == ":") {
          titled = true;
          break;
        }
      }
    }
    if (!titled) {
      script_.units.push_back(IrUnit{type, "", {}, Span{line, line, col}});
      std::size_t idx = script_.units.size() - 1;
      attributes(idx);
      close_brace(idx, line);
      return;
    }
    while (peek() && !at_op("}")) {
      const PuppetToken* title = peek();
      std::size_t b = pos_;
      int depth = 0;
      while (const PuppetToken* t = peek()) {
        if (is_open(*t)) ++depth;
        if (is_close(*t)) {
          if (depth == 0) break;
          --depth;
        }
        if (depth == 0 && t->kind == PuppetTok::Op && t->text == ":") break;
        ++pos_;
      }
      if (!at_op(":")) break;
      std::string name = pos_ - b == 1 && t_[b].kind == PuppetTok::String
                             ? t_[b].value
                             : subject_text(b, pos_);
      ++pos_;  // :
      script_.units.push_back(IrUnit{type, name, {}, Span{line, title->line, col}});
      std::size_t idx = script_.units.size() - 1;
      attributes(idx);
      script_.units[idx].span.end_line = std::max(script_.units[idx].span.end_line, last_line());
      if (at_op(";")) ++pos_;
    }
    std::size_t last = script_.units.size() - 1;
    close_brace(last, line);
  }

  void close_brace(std::size_t idx, int line) {
    if (at_op("}")) {
      script_.units[idx].span.end_line = peek()->line;
      ++pos_;
    } else {
      fail(line, "unbalanced braces: resource not closed");
      script_.units[idx].span.end_line = last_line();
    }
  }

  // key => value pairs until ';' or '}' at depth 0.
  void attributes(std::size_t idx) {
    while (const PuppetToken* t = peek()) {
      if (t->kind == PuppetTok::Op && (t->text == "}" || t->text == ";")) return;
      if (t->kind == PuppetTok::Op && t->text == ",") {
        ++pos_;
        continue;
      }
      if ((t->kind == PuppetTok::Word || t->kind == PuppetTok::String ||
           (t->kind == PuppetTok::Op && t->text == "*")) &&
          (at_op("=>", 1) || at_op("+>", 1))) {
        const PuppetToken* key = t;
        pos_ += 2;
        add_value(script_.units[idx], key,
                  key->kind == PuppetTok::String ? key->value : key->text, {",", ";", "}"});
        continue;
      }
      if (is_open(*t)) {
        skip_group();
        continue;
      }
      ++pos_;
    }
  }

  void bare_pair(std::optional<std::size_t> unit) {
    const PuppetToken* key = peek();
    pos_ += 2;
    IrUnit& u = container(unit);
    add_value(u, key, key->kind == PuppetTok::String ? key->value : key->text,
              {",", ";", "}"});
  }

  void assignment(std::optional<std::size_t> unit) {
    const PuppetToken* key = peek();
    pos_ += 2;
    IrUnit& u = container(unit);
    // assignments end at the line break unless brackets are open
    add_value(u, key, key->text, {";", "}"}, /*stop_at_newline=*/true);
  }

  void add_value(IrUnit& unit, const PuppetToken* key, std::string key_text,
                 std::initializer_list<std::string_view> stops,
                 bool stop_at_newline = false) {
    std::size_t b = pos_;
    int depth = 0;
    int last = key->line;
    while (const PuppetToken* t = peek()) {
      if (depth == 0) {
        bool stop = false;
        if (t->kind == PuppetTok::Op) {
          for (auto s : stops) stop = stop || t->text == s;
          if (t->text == ")" || t->text == "]") stop = true;
        }
        if (stop_at_newline && pos_ > b && t->line > last) stop = true;
        if (stop) break;
      }
      if (t->kind == PuppetTok::Op && t->text == "?" && depth == 0 && at_op("{", 1)) {
        selector(std::nullopt, t->line);
        last = last_line();
        continue;
      }
      if (is_open(*t)) ++depth;
      if (is_close(*t)) --depth;
      last = t->end_line;
      ++pos_;
    }
    std::string value;
    if (pos_ - b == 1 && t_[b].kind == PuppetTok::String) {
      value = t_[b].value;
    } else {
      value = subject_text(b, pos_);
    }
    Span span{key->line, std::max(key->line, last), key->col};
    unit.attributes.push_back(
        make_attribute(std::move(key_text), std::move(value), IacLanguage::Puppet, span));
    unit.span.end_line = std::max(unit.span.end_line, span.end_line);
  }

  IrScript& script_;
  std::vector<PuppetToken> t_;
  std::size_t pos_ = 0;
  std::optional<std::size_t> bare_;
  bool failed_ = false;
};

}  // namespace

IrScript parse_puppet(std::string_view content, std::string_view path) {
  IrScript script = detail::start_script(IacLanguage::Puppet, content, path);
  detail::PuppetLex lex = detail::lex_puppet(script.text());
  std::vector<PuppetToken> code;
  for (auto& t : lex.tokens) {
    if (t.kind == PuppetTok::Comment) {
      bool block = t.text.starts_with("/*");
      script.comments.push_back(detail::make_comment(t.value, t.line, t.col));
      if (block) script.comments.back().span.end_line = t.end_line;
    } else {
      code.push_back(std::move(t));
    }
  }
  PuppetParser parser(script, std::move(code));
  parser.run();
  if (lex.error || parser.failed()) {
    script.parse_failed = true;
    if (lex.error) script.parse_error = lex.error;
    // Structure is unreliable: fall back to line extraction, keeping cases.
    script.units.clear();
    script.comments.clear();
    detail::extract_lines(script, 1);
  }
  detail::finish_script(script);
  return script;
}

}  // namespace iacsmell
