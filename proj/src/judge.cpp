#include <cctype>
#include <regex>

#include "iacsmell/error.hpp"
#include "iacsmell/eval.hpp"

namespace iacsmell {

double parse_judgment(std::string_view reply) {
  const std::string s(reply);
  static const std::regex num(R"(\d+)");
  static const std::regex range_after(R"(^\s*(-|–|to|and)\s*4\b)", std::regex::icase);
  static const std::regex scale_before(
      R"((/|out of|scale of|from|between|range of|-|–|\bto|\band)\s*$)", std::regex::icase);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::size_t pos = static_cast<std::size_t>(m.position(0));
    const std::size_t end = pos + static_cast<std::size_t>(m.length(0));
    // part of a decimal like 3.5 or 0.75: take the integer part only when it leads
    if (pos > 0 && s[pos - 1] == '.' && pos > 1 && std::isdigit(static_cast<unsigned char>(s[pos - 2]))) continue;
    const std::string after = s.substr(end, 16);
    const std::string before = s.substr(pos >= 16 ? pos - 16 : 0, pos >= 16 ? 16 : pos);
    if (m.str() == "0" && std::regex_search(after, range_after)) continue;
    if (m.str() == "4" && std::regex_search(before, scale_before)) continue;
    if (m.length(0) > 1) continue;
    const int v = m.str()[0] - '0';
    if (v < 0 || v > 4) continue;
    return v / 4.0;
  }
  throw UnparseableJudgment("judge reply has no score between 0 and 4");
}

std::string judge_payload(std::string_view instruction, std::string_view code) {
  std::string p = "Instruction:\n";
  p += instruction;
  p += "\n\nScript:\n```\n";
  p += code;
  if (!code.empty() && code.back() != '\n') p += '\n';
  p += "```\n";
  return p;
}

}  // namespace iacsmell
