#include "iacsmell/curation.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "iacsmell/corpus.hpp"
#include "iacsmell/dataset.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Verdict v) {
  return v == Verdict::Keep ? "keep" : "false_positive";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  std::string v = text::lower(text::trim(s));
  if (v == "keep") return Verdict::Keep;
  if (v == "false_positive" || v == "false-positive" || v == "fp") return Verdict::FalsePositive;
  return std::nullopt;
}

json to_json(const ReviewEntry& e) {
  json dets = json::array();
  for (const auto& d : e.detections) {
    dets.push_back(json{{"smell", smell_id(d.smell)},
                        {"line", d.line},
                        {"evidence", d.evidence},
                        {"text", d.text},
                        {"verdict", d.verdict ? json(std::string(to_string(*d.verdict))) : json(nullptr)}});
  }
  return json{{"script_id", e.script_id},
              {"path", e.path},
              {"language", std::string(to_string(e.language))},
              {"sampled_for", smell_id(e.sampled_for)},
              {"sha256", e.sha256},
              {"normalized_sha256", e.normalized_sha256},
              {"detections", dets}};
}

ReviewEntry review_entry_from_json(const json& j) {
  ReviewEntry e;
  e.script_id = j.at("script_id").get<std::string>();
  e.path = j.value("path", e.script_id);
  auto lang = language_from_string(j.at("language").get<std::string>());
  if (!lang) throw ManifestUnreadable("unknown language for " + e.script_id);
  e.language = *lang;
  if (auto s = smell_from_string(j.value("sampled_for", ""))) e.sampled_for = *s;
  e.sha256 = j.value("sha256", "");
  e.normalized_sha256 = j.value("normalized_sha256", "");
  for (const auto& d : j.value("detections", json::array())) {
    ReviewDetection rd;
    auto s = smell_from_string(d.at("smell").get<std::string>());
    if (!s) throw ManifestUnreadable("unknown smell for " + e.script_id);
    rd.smell = *s;
    rd.line = d.value("line", 0);
    rd.evidence = d.value("evidence", "");
    rd.text = d.value("text", "");
    if (d.contains("verdict") && d["verdict"].is_string()) {
      rd.verdict = verdict_from_string(d["verdict"].get<std::string>());
      if (!rd.verdict) throw ManifestUnreadable("bad verdict for " + e.script_id);
    }
    e.detections.push_back(std::move(rd));
  }
  return e;
}

std::string review_to_jsonl(const std::vector<ReviewEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += to_json(e).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<ReviewEntry> review_from_jsonl(std::string_view text) {
  std::vector<ReviewEntry> out;
  std::size_t row = 0;
  for (const auto& line : split_lines(text)) {
    ++row;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(review_entry_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ManifestUnreadable("review row " + std::to_string(row) + ": " + e.what());
    } catch (const ManifestUnreadable& e) {
      throw ManifestUnreadable("review row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

SampleResult curate_sample(const fs::path& corpus_dir, int per_type, std::uint64_t seed,
                           const RuleConfig& rules, unsigned jobs) {
  if (per_type < 1) throw Error("per_type must be at least 1");
  const std::vector<fs::path> files = list_iac_files(corpus_dir);
  if (files.empty()) throw EmptyCorpus("no IaC scripts under " + corpus_dir.string());
  const std::vector<ScannedFile> scanned = scan_files(files, rules, jobs);

  SampleResult res;
  for (SmellType t : kAllSmells) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < scanned.size(); ++i) {
      const auto& d = scanned[i].detections;
      if (std::any_of(d.begin(), d.end(), [&](const Detection& x) { return x.smell == t; })) {
        hits.push_back(i);
      }
    }
    res.found[index_of(t)] = hits.size();
    const std::size_t want = static_cast<std::size_t>(per_type);
    if (hits.size() < want) {
      res.warnings.push_back("InsufficientSamples: " + std::string(smell_id(t)) + " found " +
                             std::to_string(hits.size()) + " of " + std::to_string(want));
    }
    // a distinct stream per type so types do not share draws
    const std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (index_of(t) + 1));
    const std::vector<std::size_t> perm = seeded_permutation(hits.size(), s);
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < std::min(want, hits.size()); ++k) picked.push_back(hits[perm[k]]);
    std::sort(picked.begin(), picked.end());

    for (std::size_t i : picked) {
      const ScannedFile& f = scanned[i];
      ReviewEntry e;
      e.script_id = relative_id(f.path, corpus_dir);
      e.path = e.script_id;
      e.language = f.script.language;
      e.sampled_for = t;
      e.sha256 = sha256_hex(f.content);
      e.normalized_sha256 = normalized_sha256_hex(f.content);
      for (const auto& d : f.detections) {
        ReviewDetection rd;
        rd.smell = d.smell;
        rd.line = d.span.start_line;
        rd.evidence = d.evidence;
        std::string l = f.script.lines[static_cast<std::size_t>(d.span.start_line - 1)];
        rd.text = std::string(text::trim(l));
        e.detections.push_back(std::move(rd));
      }
      res.entries.push_back(std::move(e));
    }
  }
  return res;
}

json FinalizeStats::to_json() const {
  json pt = json::object();
  for (SmellType t : kAllSmells) pt[std::string(smell_id(t))] = per_type[index_of(t)];
  return json{{"rows", rows},
              {"scripts_reviewed", scripts_reviewed},
              {"detections_reviewed", detections_reviewed},
              {"kept", kept},
              {"false_positives", false_positives},
              {"scripts_dropped", scripts_dropped},
              {"scripts", scripts},
              {"weaknesses", weaknesses},
              {"per_type", pt}};
}

FinalizeResult curate_finalize(const std::vector<ReviewEntry>& rows,
                               const std::optional<fs::path>& script_root) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& d : rows[r].detections) {
      if (!d.verdict) {
        throw MissingVerdict(r + 1, "review row " + std::to_string(r + 1) + " (" +
                                        rows[r].script_id + ") has a detection without a verdict");
      }
    }
  }

  struct Merged {
    const ReviewEntry* first = nullptr;
    // (smell, line) -> (text, all keep so far)
    std::map<std::pair<SmellType, int>, std::pair<std::string, bool>> dets;
  };
  std::vector<std::string> order;
  std::map<std::string, Merged> by_id;
  FinalizeResult res;
  res.stats.rows = rows.size();
  for (const auto& row : rows) {
    auto [it, fresh] = by_id.try_emplace(row.script_id);
    if (fresh) {
      it->second.first = &row;
      order.push_back(row.script_id);
    }
    for (const auto& d : row.detections) {
      auto key = std::make_pair(d.smell, d.line);
      auto [dit, added] = it->second.dets.try_emplace(key, d.text, true);
      if (*d.verdict != Verdict::Keep) dit->second.second = false;
      (void)added;
    }
  }
  res.stats.scripts_reviewed = order.size();

  for (const auto& id : order) {
    const Merged& m = by_id.at(id);
    ManifestEntry e;
    e.script_id = id;
    e.path = m.first->path;
    e.language = m.first->language;
    e.sha256 = m.first->sha256;
    e.normalized_sha256 = m.first->normalized_sha256;
    std::vector<std::pair<std::pair<SmellType, int>, std::string>> kept;
    for (const auto& [key, v] : m.dets) {
      ++res.stats.detections_reviewed;
      if (v.second) {
        ++res.stats.kept;
        kept.emplace_back(key, v.first);
      } else {
        ++res.stats.false_positives;
      }
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first.second, a.first.first) < std::tie(b.first.second, b.first.first);
    });
    for (const auto& [key, txt] : kept) e.truth.push_back(TruthItem{key.first, key.second, txt});
    if (e.truth.empty()) {
      ++res.stats.scripts_dropped;
      continue;
    }
    e.verified = true;
    if (script_root) {
      fs::path p = *script_root / e.path;
      std::error_code ec;
      if (fs::is_regular_file(p, ec)) {
        IrScript s = parse_as(e.language, read_file(p), e.path);
        e.instruction_low = template_instruction(s, Detail::Low);
        e.instruction_high = template_instruction(s, Detail::High);
      } else {
        res.warnings.push_back("script not found for instructions: " + p.string());
      }
    }
    for (const auto& t : e.truth) ++res.stats.per_type[index_of(t.smell)];
    res.stats.weaknesses += e.truth.size();
    res.manifest.entries.push_back(std::move(e));
  }
  res.stats.scripts = res.manifest.entries.size();
  if (res.manifest.entries.empty()) {
    res.warnings.push_back("every detection was rejected; the manifest is empty");
  }
  return res;
}

}  // namespace iacsmell
