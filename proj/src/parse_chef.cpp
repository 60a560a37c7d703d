#include <algorithm>
#include <set>

#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"
#include "parse_common.hpp"
#include "ruby_lex.hpp"

namespace iacsmell {
namespace {

using detail::RubyTok;
using detail::RubyToken;
using Stmt = std::vector<const RubyToken*>;

bool is_op(const RubyToken* t, std::string_view op) {
  return t->kind == RubyTok::Op && t->text == op;
}
bool is_word(const RubyToken* t, std::string_view w) {
  return t->kind == RubyTok::Ident && t->text == w;
}
bool is_open(const RubyToken* t) {
  return t->kind == RubyTok::Op && (t->text == "(" || t->text == "[" || t->text == "{");
}
bool is_close(const RubyToken* t) {
  return t->kind == RubyTok::Op && (t->text == ")" || t->text == "]" || t->text == "}");
}

bool continues_line(const RubyToken* last) {
  static const std::set<std::string, std::less<>> ops = {
      ",", "\\", "=>", "=", "+", "-", "*", "/", "&&", "||", ".", "&.", "?",
      "::", "+=", "-=", "||=", "&&=", "<<", "==", "!=", "=~", "%"};
  if (last->kind == RubyTok::Op) return ops.contains(last->text);
  if (last->kind == RubyTok::Label) return true;
  return is_word(last, "and") || is_word(last, "or") || is_word(last, "not");
}

// Source-like text of tokens [b, e).
std::string join_tokens(const Stmt& s, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b && s[i]->space_before) out.push_back(' ');
    out += s[i]->text;
  }
  return out;
}

std::string value_text(const Stmt& s, std::size_t b, std::size_t e) {
  if (b >= e) return {};
  if (e - b == 1) {
    const RubyToken* t = s[b];
    if (t->kind == RubyTok::String) return t->value;
    return t->text;
  }
  // a single parenthesized argument
  if (e - b == 3 && is_op(s[b], "(") && is_op(s[e - 1], ")")) {
    return value_text(s, b + 1, e - 1);
  }
  return join_tokens(s, b, e);
}

enum class FrameKind { Resource, Case, Other };

struct Frame {
  FrameKind kind;
  std::size_t index = 0;  // unit or case index
};

class ChefBuilder {
 public:
  explicit ChefBuilder(IrScript& script) : script_(script) {}

  void run(const std::vector<RubyToken>& tokens) {
    Stmt stmt;
    int depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const RubyToken& t = tokens[i];
      if (t.kind == RubyTok::Comment) {
        script_.comments.push_back(detail::make_comment(t.value, t.line, t.col));
        continue;
      }
      if (t.kind == RubyTok::Newline) {
        if (stmt.empty()) continue;
        bool join = depth > 0 || (t.text == "\n" && continues_line(stmt.back()));
        if (!join && t.text == "\n") {
          // leading-dot method chains continue the previous line
          std::size_t k = i + 1;
          while (k < tokens.size() && (tokens[k].kind == RubyTok::Newline ||
                                       tokens[k].kind == RubyTok::Comment)) {
            if (tokens[k].kind == RubyTok::Comment) {
              script_.comments.push_back(
                  detail::make_comment(tokens[k].value, tokens[k].line, tokens[k].col));
              i = k;
            }
            ++k;
          }
          if (k < tokens.size() && (is_op(&tokens[k], ".") || is_op(&tokens[k], "&."))) {
            join = true;
          }
        }
        if (join) continue;
        process(stmt);
        stmt.clear();
        depth = 0;
        continue;
      }
      if (is_open(&t)) ++depth;
      if (is_close(&t) && depth > 0) --depth;
      stmt.push_back(&t);
    }
    if (!stmt.empty()) process(stmt);
    if (!frames_.empty()) {
      fail(frame_line(frames_.back()), "unmatched do/end: missing 'end'");
      while (!frames_.empty()) pop(static_cast<int>(script_.lines.size()));
    }
  }

  bool failed() const { return failed_; }

 private:
  int frame_line(const Frame& f) const {
    if (f.kind == FrameKind::Resource) return script_.units[f.index].span.start_line;
    if (f.kind == FrameKind::Case) return script_.cases[f.index].span.start_line;
    return 0;
  }

  void fail(int line, std::string reason) {
    failed_ = true;
    if (!script_.parse_error) script_.parse_error = ParseError{line, std::move(reason)};
  }

  void pop(int line) {
    if (frames_.empty()) {
      fail(line, "unmatched do/end: unexpected 'end'");
      return;
    }
    Frame f = frames_.back();
    frames_.pop_back();
    if (f.kind == FrameKind::Resource) {
      script_.units[f.index].span.end_line = std::max(script_.units[f.index].span.end_line, line);
    } else if (f.kind == FrameKind::Case) {
      script_.cases[f.index].span.end_line = line;
    }
  }

  std::optional<std::size_t> innermost_resource() const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      if (it->kind == FrameKind::Resource) return it->index;
    }
    return std::nullopt;
  }

  // `word args do [|x|]` with a plain identifier head.
  std::optional<std::size_t> resource_do_index(const Stmt& s) const {
    if (s.size() < 3 || s[0]->kind != RubyTok::Ident || detail::ruby_is_keyword(s[0]->text)) {
      return std::nullopt;
    }
    const char c0 = s[0]->text[0];
    if (!std::islower(static_cast<unsigned char>(c0)) && c0 != '_') return std::nullopt;
    if (s[1]->kind == RubyTok::Op && s[1]->text != "(") return std::nullopt;
    if (s[1]->kind == RubyTok::Op && s[1]->space_before) return std::nullopt;
    if (is_word(s[1], "do")) return std::nullopt;
    int depth = 0;
    for (std::size_t k = 1; k < s.size(); ++k) {
      if (is_open(s[k])) ++depth;
      if (is_close(s[k])) --depth;
      if (depth == 0 && is_word(s[k], "do")) {
        std::size_t rest = k + 1;
        if (rest == s.size()) return k;
        if (is_op(s[rest], "|") && is_op(s.back(), "|")) return k;
        return std::nullopt;
      }
      if (depth == 0 && (is_op(s[k], "=") || is_op(s[k], ".")) && k == 1) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void process(const Stmt& s) {
    const RubyToken* first = s.front();
    const int line = first->line;
    if (first->kind == RubyTok::Ident) {
      const std::string& w = first->text;
      if (w == "when" || w == "in") {
        if (!frames_.empty() && frames_.back().kind == FrameKind::Case) {
          ++script_.cases[frames_.back().index].branch_count;
        }
        scan_blocks(s, 1);
        return;
      }
      if (w == "else") {
        if (!frames_.empty() && frames_.back().kind == FrameKind::Case) {
          script_.cases[frames_.back().index].has_default = true;
        }
        scan_blocks(s, 1);
        return;
      }
      if (w == "case") {
        IrCase c;
        c.subject = join_tokens(s, 1, s.size());
        c.span = Span{line, line, first->col};
        script_.cases.push_back(std::move(c));
        frames_.push_back({FrameKind::Case, script_.cases.size() - 1});
        return;
      }
    }

    if (auto do_at = resource_do_index(s)) {
      IrUnit unit;
      unit.kind = first->text;
      std::size_t b = 1, e = *do_at;
      if (is_op(s[b], "(") && is_op(s[e - 1], ")")) {
        ++b;
        --e;
      }
      std::size_t arg_end = b;
      while (arg_end < e && !is_op(s[arg_end], ",")) ++arg_end;
      unit.name = value_text(s, b, arg_end);
      unit.span = Span{line, s.back()->end_line, first->col};
      script_.units.push_back(std::move(unit));
      frames_.push_back({FrameKind::Resource, script_.units.size() - 1});
      return;
    }

    bindings(s);
    scan_blocks(s, 0);
  }

  // Opens/closes frames for keywords and `do` found in the statement.
  void scan_blocks(const Stmt& s, std::size_t from) {
    static const std::set<std::string, std::less<>> cond = {"if", "unless", "while", "until"};
    static const std::set<std::string, std::less<>> always = {"begin", "def", "class",
                                                              "module", "for"};
    const bool loop_head = !s.empty() && (is_word(s[0], "while") || is_word(s[0], "until") ||
                                          is_word(s[0], "for"));
    for (std::size_t k = from; k < s.size(); ++k) {
      const RubyToken* t = s[k];
      if (t->kind != RubyTok::Ident) continue;
      const RubyToken* prev = k > 0 ? s[k - 1] : nullptr;
      if (prev && (is_op(prev, ".") || is_op(prev, "&.") || is_op(prev, "::"))) continue;
      if (cond.contains(t->text)) {
        bool opens = k == from || (prev && prev->kind == RubyTok::Op &&
                                   prev->text != ")" && prev->text != "]" &&
                                   prev->text != "}") ||
                     (prev && (is_word(prev, "return") || is_word(prev, "then")));
        if (opens) frames_.push_back({FrameKind::Other, 0});
      } else if (always.contains(t->text)) {
        if (t->text == "def" && endless_def(s, k)) continue;
        frames_.push_back({FrameKind::Other, 0});
      } else if (t->text == "do") {
        if (!loop_head) frames_.push_back({FrameKind::Other, 0});
      } else if (t->text == "end") {
        pop(t->line);
      }
    }
  }

  static bool endless_def(const Stmt& s, std::size_t k) {
    int depth = 0;
    for (std::size_t j = k + 1; j < s.size(); ++j) {
      if (is_open(s[j])) ++depth;
      if (is_close(s[j])) --depth;
      if (depth == 0 && is_op(s[j], "=")) return true;
    }
    return false;
  }

  IrUnit& unit_for(const Stmt& s) {
    if (auto r = innermost_resource()) return script_.units[*r];
    if (!call_unit_) {
      IrUnit unit;
      unit.kind = s[0]->kind == RubyTok::Ident ? s[0]->text : "hash";
      unit.span = Span{s[0]->line, s.back()->end_line, s[0]->col};
      script_.units.push_back(std::move(unit));
      call_unit_ = script_.units.size() - 1;
    }
    return script_.units[*call_unit_];
  }

  void add(IrUnit& unit, const RubyToken* key_tok, std::string key, const Stmt& s,
           std::size_t b, std::size_t e) {
    int end_line = e > b ? s[e - 1]->end_line : key_tok->line;
    Span span{key_tok->line, std::max(end_line, key_tok->line), key_tok->col};
    unit.attributes.push_back(
        make_attribute(std::move(key), value_text(s, b, e), IacLanguage::Chef, span));
    unit.span.end_line = std::max(unit.span.end_line, span.end_line);
  }

  // End of a hash value starting at b: next ',' at the same depth or a
  // closing bracket that leaves it.
  static std::size_t value_end(const Stmt& s, std::size_t b) {
    int depth = 0;
    std::size_t k = b;
    for (; k < s.size(); ++k) {
      if (is_open(s[k])) ++depth;
      if (is_close(s[k])) {
        if (depth == 0) break;
        --depth;
      }
      if (depth == 0 && is_op(s[k], ",")) break;
      if (depth == 0 && is_word(s[k], "do")) break;
    }
    return k;
  }

  void bindings(const Stmt& s) {
    call_unit_.reset();
    const RubyToken* first = s.front();
    if (first->kind == RubyTok::Ident && detail::ruby_is_keyword(first->text) &&
        first->text != "self") {
      return;
    }
    bool any_pair = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k]->kind == RubyTok::Label) {
        std::size_t e = value_end(s, k + 1);
        add(unit_for(s), s[k], s[k]->value, s, k + 1, e);
        any_pair = true;
      } else if (is_op(s[k], "=>") && k > 0) {
        const RubyToken* key = s[k - 1];
        if (key->kind != RubyTok::String && key->kind != RubyTok::Symbol &&
            key->kind != RubyTok::Ident) {
          continue;
        }
        std::size_t e = value_end(s, k + 1);
        std::string key_text = key->kind == RubyTok::String ? key->value : key->text;
        add(unit_for(s), key, key_text, s, k + 1, e);
        any_pair = true;
      }
    }
    if (any_pair) return;

    // assignment
    int depth = 0;
    for (std::size_t k = 1; k < s.size(); ++k) {
      if (is_open(s[k])) ++depth;
      if (is_close(s[k])) --depth;
      if (depth == 0 && (is_op(s[k], "=") || is_op(s[k], "||="))) {
        if (is_word(s[k + 1 < s.size() ? k + 1 : k], "if") ||
            is_word(s[k + 1 < s.size() ? k + 1 : k], "case")) {
          return;
        }
        std::size_t e = s.size();
        for (std::size_t j = k + 1; j < s.size(); ++j) {
          if (is_word(s[j], "do") || is_word(s[j], "if") || is_word(s[j], "unless")) {
            e = j;
            break;
          }
        }
        add(unit_for(s), first, join_tokens(s, 0, k), s, k + 1, e);
        return;
      }
    }

    // command call: `word args`
    if (first->kind != RubyTok::Ident || s.size() < 2) return;
    const char c0 = first->text[0];
    if (!std::islower(static_cast<unsigned char>(c0)) && c0 != '_') return;
    const RubyToken* arg = s[1];
    if (arg->kind == RubyTok::Op) {
      if (arg->text != "(" || arg->space_before) {
        bool unary = (arg->text == "[" || arg->text == "-" || arg->text == "!" ||
                      arg->text == "::") &&
                     arg->space_before && s.size() > 2 && !s[2]->space_before;
        if (!unary) return;
      }
    }
    if (is_word(arg, "do") || is_word(arg, "if") || is_word(arg, "unless") ||
        is_word(arg, "and") || is_word(arg, "or")) {
      return;
    }
    std::size_t e = s.size();
    for (std::size_t j = 1; j < s.size(); ++j) {
      if ((is_word(s[j], "if") || is_word(s[j], "unless") || is_word(s[j], "do")) &&
          s[j]->space_before) {
        e = j;
        break;
      }
    }
    if (auto r = innermost_resource()) {
      add(script_.units[*r], first, first->text, s, 1, e);
      return;
    }
    IrUnit unit;
    unit.kind = first->text;
    std::size_t arg_end = 1;
    if (is_op(s[1], "(")) {
      arg_end = 2;
      while (arg_end < e && !is_op(s[arg_end], ",") && !is_op(s[arg_end], ")")) ++arg_end;
      unit.name = value_text(s, 2, arg_end);
    } else {
      while (arg_end < e && !is_op(s[arg_end], ",")) ++arg_end;
      unit.name = value_text(s, 1, arg_end);
    }
    unit.span = Span{first->line, s.back()->end_line, first->col};
    script_.units.push_back(std::move(unit));
  }

  IrScript& script_;
  std::vector<Frame> frames_;
  std::optional<std::size_t> call_unit_;
  bool failed_ = false;
};

}  // namespace

IrScript parse_chef(std::string_view content, std::string_view path) {
  IrScript script = detail::start_script(IacLanguage::Chef, content, path);
  const std::string text = script.text();
  detail::RubyLex lex = detail::lex_ruby(text);
  ChefBuilder builder(script);
  builder.run(lex.tokens);
  if (lex.error) {
    script.parse_failed = true;
    script.parse_error = lex.error;
    // Lines past the broken literal were not tokenized.
    int resume = lex.error->line + 1;
    std::erase_if(script.comments,
                  [&](const IrComment& c) { return c.span.start_line >= resume; });
    detail::extract_lines(script, resume);
  } else if (builder.failed()) {
    script.parse_failed = true;
  }
  detail::finish_script(script);
  return script;
}

}  // namespace iacsmell
