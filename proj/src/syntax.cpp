#include <yaml-cpp/yaml.h>

#include "iacsmell/eval.hpp"
#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"
#include "puppet_lex.hpp"
#include "ruby_lex.hpp"
#include "yaml_scan.hpp"

namespace iacsmell {
namespace {

struct Fence {
  std::string info;
  std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
  std::vector<Fence> out;
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view t = text::trim(lines[i]);
    if (!t.starts_with("```")) continue;
    Fence f;
    f.info = text::lower(text::trim(t.substr(3)));
    std::size_t j = i + 1;
    std::vector<std::string> body;
    for (; j < lines.size(); ++j) {
      if (text::trim(lines[j]).starts_with("```")) break;
      body.push_back(lines[j]);
    }
    f.body = text::join(body, "\n");
    if (!body.empty()) f.body.push_back('\n');
    out.push_back(std::move(f));
    i = j;
  }
  return out;
}

bool info_matches(const std::string& info, IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible:
      return info == "yaml" || info == "yml" || info == "ansible";
    case IacLanguage::Chef:
      return info == "ruby" || info == "rb" || info == "chef";
    case IacLanguage::Puppet:
      return info == "puppet" || info == "pp";
  }
  return false;
}

SyntaxResult fail(std::string reason) { return SyntaxResult{false, std::move(reason)}; }

SyntaxResult check_ansible(const std::string& code) {
  if (text::trim(code).empty()) return fail("empty document");
  std::vector<std::string> lines = split_lines(code);
  detail::YamlScan scan = detail::scan_yaml(lines);
  if (scan.error) {
    return fail("line " + std::to_string(scan.error->line) + ": " + scan.error->reason);
  }
  for (const auto& s : scan.scalars) {
    if (auto why = detail::check_jinja_delimiters(s.text)) {
      return fail("line " + std::to_string(s.line) + ": " + *why);
    }
  }
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAll(code);
  } catch (const YAML::Exception& e) {
    return fail("line " + std::to_string(e.mark.is_null() ? 0 : e.mark.line + 1) + ": " + e.msg);
  }
  bool any = false;
  for (const auto& d : docs) {
    if (!d || d.IsNull()) continue;
    if (!d.IsMap() && !d.IsSequence()) return fail("top level is not a sequence or mapping");
    any = true;
  }
  if (!any) return fail("empty document");
  return {};
}

template <typename Tok>
std::optional<std::string> bracket_mismatch(const std::vector<Tok>& tokens, auto is_op) {
  std::vector<const Tok*> stack;
  for (const auto& t : tokens) {
    if (!is_op(t)) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      stack.push_back(&t);
    } else if (t.text == ")" || t.text == "]" || t.text == "}") {
      const char want = t.text == ")" ? '(' : t.text == "]" ? '[' : '{';
      if (stack.empty()) {
        return "line " + std::to_string(t.line) + ": unexpected '" + t.text + "'";
      }
      if (stack.back()->text[0] != want) {
        return "line " + std::to_string(t.line) + ": '" + t.text + "' closes '" +
               stack.back()->text + "' from line " + std::to_string(stack.back()->line);
      }
      stack.pop_back();
    }
  }
  if (!stack.empty()) {
    return "line " + std::to_string(stack.back()->line) + ": unclosed '" +
           stack.back()->text + "'";
  }
  return std::nullopt;
}

SyntaxResult check_chef(const std::string& code) {
  detail::RubyLex lex = detail::lex_ruby(code);
  if (lex.error) return fail("line " + std::to_string(lex.error->line) + ": " + lex.error->reason);
  if (auto m = bracket_mismatch(lex.tokens, [](const detail::RubyToken& t) {
        return t.kind == detail::RubyTok::Op;
      })) {
    return fail(*m);
  }
  IrScript s = parse_chef(code, "");
  if (s.parse_failed) {
    const ParseError e = s.parse_error.value_or(ParseError{0, "unbalanced do/end"});
    return fail("line " + std::to_string(e.line) + ": " + e.reason);
  }
  return {};
}

SyntaxResult check_puppet(const std::string& code) {
  detail::PuppetLex lex = detail::lex_puppet(code);
  if (lex.error) return fail("line " + std::to_string(lex.error->line) + ": " + lex.error->reason);
  std::vector<detail::PuppetToken> toks;
  for (auto& t : lex.tokens) {
    if (t.kind != detail::PuppetTok::Comment) toks.push_back(t);
  }
  using detail::PuppetTok;
  if (auto m = bracket_mismatch(toks, [](const detail::PuppetToken& t) {
        return t.kind == PuppetTok::Op;
      })) {
    return fail(*m);
  }
  // A titled body `{ 'title': ...` must follow a type name.
  int pending_case = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == PuppetTok::Word && t.text == "case") ++pending_case;
    if (t.kind != PuppetTok::Op || t.text != "{") continue;
    const auto* prev = i > 0 ? &toks[i - 1] : nullptr;
    bool selector = prev && prev->kind == PuppetTok::Op && prev->text == "?";
    if (pending_case > 0 && !selector) {
      --pending_case;
      continue;
    }
    if (i + 2 >= toks.size()) continue;
    bool titled = (toks[i + 1].kind == PuppetTok::String ||
                   toks[i + 1].kind == PuppetTok::Variable) &&
                  toks[i + 2].kind == PuppetTok::Op && toks[i + 2].text == ":";
    if (toks[i + 1].kind == PuppetTok::Op && toks[i + 1].text == "[") {
      int depth = 0;
      std::size_t k = i + 1;
      for (; k < toks.size(); ++k) {
        if (toks[k].kind == PuppetTok::Op && toks[k].text == "[") ++depth;
        if (toks[k].kind == PuppetTok::Op && toks[k].text == "]" && --depth == 0) break;
      }
      titled = k + 1 < toks.size() && toks[k + 1].kind == PuppetTok::Op && toks[k + 1].text == ":";
    }
    if (titled && (!prev || prev->kind != PuppetTok::Word)) {
      return fail("line " + std::to_string(t.line) + ": resource body without a type name");
    }
  }
  return {};
}

}  // namespace

std::string extract_code(std::string_view text, IacLanguage language) {
  std::vector<Fence> blocks = fenced_blocks(text);
  if (blocks.empty()) return std::string(text);
  for (const auto& b : blocks) {
    if (info_matches(b.info, language)) return b.body;
  }
  return blocks.front().body;
}

SyntaxResult check_syntax(std::string_view content, IacLanguage language) {
  const std::string code = extract_code(content, language);
  switch (language) {
    case IacLanguage::Ansible: return check_ansible(code);
    case IacLanguage::Chef: return check_chef(code);
    case IacLanguage::Puppet: return check_puppet(code);
  }
  return {};
}

}  // namespace iacsmell
