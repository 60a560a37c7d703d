#include <regex>

#include "iacsmell/eval.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {
namespace {

using text::icontains;

bool any_of(std::string_view s, std::initializer_list<std::string_view> needles) {
  for (auto n : needles) {
    if (icontains(s, n)) return true;
  }
  return false;
}

bool any_word(std::string_view s, std::initializer_list<std::string_view> words) {
  for (auto w : words) {
    if (text::contains_word(s, w)) return true;
  }
  return false;
}

// Sentences that explicitly say nothing was found.
bool negated(std::string_view s) {
  static const std::regex re(
      R"(\b(no|not any|without any|none of the)\s+(security\s+)?(weakness|smell|issue|vulnerabilit|problem|hard-?coded|secret)|\bdoes not (contain|have|use)\b|\bnot (found|detected|present)\b|\bthere (are|is) no\b)",
      std::regex::icase);
  return std::regex_search(s.begin(), s.end(), re);
}

std::array<bool, kSmellCount> classify_sentence(std::string_view s, std::string_view next) {
  std::array<bool, kSmellCount> hit{};
  auto set = [&](SmellType t) { hit[index_of(t)] = true; };
  if (any_of(s, {"root user", "least privilege", "privileged", "running as root", "as the root"}) ||
      any_word(s, {"admin", "administrator", "administrative"})) {
    set(SmellType::AdminByDefault);
  }
  if (any_of(s, {"empty password", "blank password", "password is empty", "password is blank"}) ||
      (icontains(s, "password") && any_of(s, {"empty string", "empty value", "left empty", "is empty", "set to empty"}))) {
    set(SmellType::EmptyPassword);
  }
  if (any_of(s, {"hard-coded", "hardcoded", "hard coded", "cwe-798"})) {
    set(SmellType::HardCodedSecret);
  }
  if (any_of(s, {"0.0.0.0", "all interfaces", "all network interfaces", "unrestricted ip", "cwe-284"})) {
    set(SmellType::UnrestrictedIpAddress);
  }
  if ((icontains(s, "comment") &&
       any_word(s, {"todo", "fixme", "hack", "xxx", "bug", "suspicious"})) ||
      icontains(s, "cwe-546")) {
    set(SmellType::SuspiciousComment);
  }
  if (any_of(s, {"without tls", "without ssl", "not using https", "does not use https", "instead of https",
                 "unencrypted http", "cwe-319"}) ||
      (icontains(s, "http://") && (icontains(s, "https") || icontains(next, "https")))) {
    set(SmellType::HttpWithoutTls);
  }
  if (any_of(s, {"weak hash", "weak cryptograph", "weak crypto", "cwe-327"}) ||
      any_word(s, {"md5", "sha-1", "sha1"})) {
    set(SmellType::WeakCryptoAlgorithm);
  }
  if (any_of(s, {"gpgcheck", "integrity", "checksum", "gpg signature", "cwe-494"})) {
    set(SmellType::NoIntegrityCheck);
  }
  if ((text::contains_word(s, "default") && text::contains_word(s, "case")) ||
      any_of(s, {"unsupported platform", "cwe-478"})) {
    set(SmellType::MissingDefaultCase);
  }
  return hit;
}

std::vector<std::string> sentences(const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  for (const auto& raw : lines) {
    std::string_view line = text::trim(raw);
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if ((c == '.' || c == '!' || c == '?') &&
          (i + 1 == line.size() || line[i + 1] == ' ' || line[i + 1] == '\t')) {
        auto piece = text::trim(line.substr(start, i + 1 - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = i + 1;
      }
    }
    auto rest = text::trim(line.substr(std::min(start, line.size())));
    if (!rest.empty()) out.emplace_back(rest);
  }
  return out;
}

bool looks_like_code(std::string_view line) {
  static const std::regex code(
      R"(^\s*(-\s+)?[\w.\-"']+:(\s|$)|^\s*-\s|=>|\{\s*$|^\s*\}|^\s*end\s*$|\bdo(\s*\|.*\|)?\s*$|^\s*#|^\s*---)");
  return std::regex_search(line.begin(), line.end(), code);
}

// Lines of prose in a response. Fenced blocks are code; without fences a
// response that is valid code on its own has no prose at all.
std::vector<std::string> prose_lines(std::string_view response, IacLanguage lang) {
  std::vector<std::string> lines = split_lines(response);
  std::vector<std::string> out;
  bool has_fence = false;
  for (const auto& l : lines) {
    if (text::trim(l).starts_with("```")) { has_fence = true; break; }
  }
  if (has_fence) {
    bool in = false;
    for (const auto& l : lines) {
      if (text::trim(l).starts_with("```")) { in = !in; continue; }
      if (!in) out.push_back(l);
    }
    return out;
  }
  if (check_syntax(response, lang).ok) {
    // Plain sentences often pass the lenient checks (a YAML scalar, a bare
    // Puppet/Ruby word list); require at least one code-shaped line.
    bool structured = false;
    for (const auto& l : lines) {
      if (looks_like_code(l)) { structured = true; break; }
    }
    if (structured) return out;
  }
  for (const auto& l : lines) {
    if (!looks_like_code(l)) out.push_back(l);
  }
  return out;
}

}  // namespace

std::optional<Channel> channel_from_string(std::string_view s) {
  std::string v = text::lower(text::trim(s));
  if (v == "comments" || v == "comment") return Channel::Comments;
  if (v == "prose") return Channel::Prose;
  if (v == "both") return Channel::Both;
  return std::nullopt;
}

int ParsedReport::total() const {
  int n = 0;
  for (int c : reported) n += c;
  return n;
}

ParsedReport parse_response(std::string_view response, IacLanguage language, Channel channel) {
  ParsedReport rep;
  std::array<int, kSmellCount> annotated{};
  std::array<bool, kSmellCount> prose{};

  if (channel != Channel::Prose) {
    static const std::regex head(R"(^\s*(#|//)\s*security\s+smell\s*!?\s*(.*)$)", std::regex::icase);
    for (const auto& raw : split_lines(response)) {
      std::string line = raw;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::smatch m;
      if (!std::regex_match(line, m, head)) continue;
      if (auto t = smell_from_title_prefix(m[2].str())) {
        ++annotated[index_of(*t)];
        rep.evidence.emplace_back(*t, std::string(text::trim(line)));
      }
    }
  }

  if (channel != Channel::Comments) {
    std::vector<std::string> sents = sentences(prose_lines(response, language));
    for (std::size_t i = 0; i < sents.size(); ++i) {
      if (negated(sents[i])) continue;
      std::string_view next = i + 1 < sents.size() ? std::string_view(sents[i + 1]) : "";
      auto hit = classify_sentence(sents[i], next);
      for (SmellType t : kAllSmells) {
        if (!hit[index_of(t)]) continue;
        if (!prose[index_of(t)] && annotated[index_of(t)] == 0) {
          rep.evidence.emplace_back(t, sents[i]);
        }
        prose[index_of(t)] = true;
      }
    }
  }

  for (SmellType t : kAllSmells) {
    std::size_t i = index_of(t);
    rep.reported[i] = std::max(annotated[i], prose[i] ? 1 : 0);
  }
  return rep;
}

}  // namespace iacsmell
