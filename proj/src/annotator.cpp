#include "iacsmell/annotator.hpp"

#include <map>

#include "iacsmell/error.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {
namespace {

constexpr std::string_view kMarker = "Security smell!";

std::string_view without_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Comment body of a whole-line comment, or nullopt.
std::optional<std::string_view> comment_body(std::string_view line) {
  std::string_view t = text::ltrim(without_cr(line));
  if (!t.starts_with('#')) return std::nullopt;
  return text::trim(t.substr(1));
}

bool word_prefix_of(std::string_view prefix, std::string_view full) {
  if (!full.starts_with(prefix)) return false;
  return prefix.size() == full.size() || full[prefix.size()] == ' ';
}

// Collapses runs of spaces so wrapped text can be compared to the advice.
std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string annotation_text(SmellType smell) {
  return std::string(kMarker) + " " + std::string(smell_title(smell)) + ": " +
         std::string(smell_advice(smell));
}

std::vector<std::string> annotation_lines(SmellType smell, std::string_view indent) {
  std::vector<std::string> out;
  std::string line = std::string(indent) + "# " + std::string(kMarker) + " " +
                     std::string(smell_title(smell)) + ":";
  for (const std::string& word : text::split(smell_advice(smell), ' ')) {
    if (word.empty()) continue;
    if (line.size() + 1 + word.size() <= kAnnotationWidth) {
      line += " " + word;
    } else {
      out.push_back(std::move(line));
      line = std::string(indent) + "# " + word;
    }
  }
  out.push_back(std::move(line));
  return out;
}

std::vector<AnnotationBlock> find_annotation_blocks(const std::vector<std::string>& lines) {
  std::vector<AnnotationBlock> blocks;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto body = comment_body(lines[i]);
    if (!body || !body->starts_with(kMarker)) continue;
    AnnotationBlock block{i, i, std::nullopt};
    std::string_view rest = text::trim(body->substr(kMarker.size()));
    for (SmellType t : kAllSmells) {
      std::string title = std::string(smell_title(t)) + ":";
      if (!rest.starts_with(title)) continue;
      block.smell = t;
      const std::string advice(smell_advice(t));
      std::string said = squash(rest.substr(title.size()));
      const std::string_view indent = text::indentation(lines[i]);
      while (said != advice && word_prefix_of(said, advice) && block.last + 1 < lines.size()) {
        const std::string& next = lines[block.last + 1];
        if (text::indentation(next) != indent) break;
        auto more = comment_body(next);
        if (!more || more->empty() || more->starts_with(kMarker)) break;
        std::string joined = said.empty() ? squash(*more) : said + " " + squash(*more);
        if (!word_prefix_of(joined, advice)) break;
        said = std::move(joined);
        ++block.last;
      }
      break;
    }
    blocks.push_back(block);
    i = block.last;
  }
  return blocks;
}

std::string annotate(const IrScript& script, const std::vector<Detection>& detections) {
  const std::vector<std::string>& lines = script.lines;
  const int n = static_cast<int>(lines.size());
  std::map<int, std::vector<SmellType>> by_line;
  for (const auto& d : detections) {
    if (d.span.start_line < 1 || d.span.start_line > n || d.span.end_line < d.span.start_line) {
      throw SpanOutOfRange("detection at line " + std::to_string(d.span.start_line) +
                           " is outside a script of " + std::to_string(n) + " lines");
    }
    by_line[d.span.start_line].push_back(d.smell);
  }
  if (by_line.empty()) return script.text();

  // Existing blocks keyed by the line index right after them.
  const std::vector<AnnotationBlock> blocks = find_annotation_blocks(lines);
  std::map<std::size_t, const AnnotationBlock*> ending_before;
  for (const auto& b : blocks) ending_before[b.last + 1] = &b;

  std::string out;
  for (int ln = 1; ln <= n; ++ln) {
    const std::string& line = lines[ln - 1];
    auto it = by_line.find(ln);
    if (it != by_line.end()) {
      std::map<SmellType, int> have;
      std::size_t cursor = static_cast<std::size_t>(ln - 1);
      for (auto b = ending_before.find(cursor); b != ending_before.end();
           b = ending_before.find(cursor)) {
        if (b->second->smell) ++have[*b->second->smell];
        cursor = b->second->first;
      }
      std::vector<SmellType> want = it->second;
      std::stable_sort(want.begin(), want.end());
      const bool crlf = !line.empty() && line.back() == '\r';
      const std::string_view indent = text::indentation(line);
      for (SmellType t : want) {
        if (have[t] > 0) {
          --have[t];
          continue;
        }
        for (const auto& a : annotation_lines(t, indent)) {
          out += a;
          if (crlf) out.push_back('\r');
          out.push_back('\n');
        }
      }
    }
    out += line;
    if (ln < n || script.trailing_newline) out.push_back('\n');
  }
  return out;
}

std::string strip_annotations(std::string_view content) {
  bool trailing = false;
  std::vector<std::string> lines = split_lines(content, &trailing);
  const std::vector<AnnotationBlock> blocks = find_annotation_blocks(lines);
  if (blocks.empty()) return std::string(content);
  std::vector<bool> drop(lines.size(), false);
  for (const auto& b : blocks) {
    for (std::size_t i = b.first; i <= b.last; ++i) drop[i] = true;
  }
  std::string out;
  bool first = true;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (drop[i]) continue;
    if (!first) out.push_back('\n');
    out += lines[i];
    first = false;
    ++kept;
  }
  if (trailing && kept > 0) out.push_back('\n');
  return out;
}

}  // namespace iacsmell
