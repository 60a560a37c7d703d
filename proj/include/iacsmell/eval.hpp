#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iacsmell/ir.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/smells.hpp"

namespace iacsmell {

// ---- syntax -------------------------------------------------------------

struct SyntaxResult {
  bool ok = true;
  std::string reason;  // empty when ok
};

/// Returns the code inside ``` fences when present (the first block whose
/// info string names `language`, else the first block); otherwise `text`.
std::string extract_code(std::string_view text, IacLanguage language);

/// Lexical well-formedness check. Fenced code is extracted first.
SyntaxResult check_syntax(std::string_view content, IacLanguage language);

// ---- response parsing ---------------------------------------------------

enum class Channel { Comments, Prose, Both };
std::optional<Channel> channel_from_string(std::string_view s);

struct ParsedReport {
  std::string script_id;
  std::array<int, kSmellCount> reported{};
  std::vector<std::pair<SmellType, std::string>> evidence;

  int total() const;
};

/// Reads weakness reports out of raw model output: annotation comments are
/// counted per title; prose sentences add at most one report per type.
ParsedReport parse_response(std::string_view text, IacLanguage language,
                            Channel channel = Channel::Both);

// ---- scoring ------------------------------------------------------------

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  void finalize();  // recomputes the ratios from tp/fp/fn
};

/// 2PR/(P+R), 0 when P+R = 0.
double f1_score(double precision, double recall);
Counts make_counts(long tp, long fp, long fn);

struct EvalReport {
  std::string label;  // free-form run label, e.g. "model / inspection"
  std::array<Counts, kSmellCount> per_type{};
  Counts overall;  // micro
  double macro_f1 = 0;
  std::size_t scripts = 0;
  std::optional<double> syntax_pass_rate_low;
  std::optional<double> syntax_pass_rate_high;
  std::optional<double> functional_low;
  std::optional<double> functional_high;
  std::optional<Counts> strict;  // line-level supplementary mode

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Per (script, type): tp = min(truth, reported), fp/fn the surplus. Scripts
/// without a report count as empty reports. Throws UnknownScript.
EvalReport score(const GroundTruthManifest& manifest,
                 const std::map<std::string, ParsedReport>& reports);

/// Strict supplementary mode: an annotation counts only when it sits directly
/// above a line whose trimmed text equals the truth item's text.
Counts score_strict(const GroundTruthManifest& manifest,
                    const std::map<std::string, std::string>& responses);

/// Two Markdown tables: overall P/R/F1 per report, then per-type F1 with the
/// macro average.
std::string reports_to_markdown(const std::vector<EvalReport>& reports);

// ---- functional judging -------------------------------------------------

/// First integer 0..4 in the reply divided by 4. Mentions of the scale
/// itself ("0-4", "0 to 4", "/4", "out of 4") are skipped. Throws
/// UnparseableJudgment.
double parse_judgment(std::string_view reply);

/// Payload sent with the Judge prompt kind.
std::string judge_payload(std::string_view instruction, std::string_view code);

}  // namespace iacsmell
