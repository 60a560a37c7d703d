#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include "iacsmell/error.hpp"
#include "iacsmell/eval.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {

using nlohmann::json;

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0 ? 2 * precision * recall / s : 0.0;
}

void Counts::finalize() {
  precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  f1 = f1_score(precision, recall);
}

Counts make_counts(long tp, long fp, long fn) {
  Counts c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.finalize();
  return c;
}

namespace {

json counts_json(const Counts& c) {
  return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
              {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

Counts counts_from(const json& j) {
  Counts c = make_counts(j.at("tp").get<long>(), j.at("fp").get<long>(), j.at("fn").get<long>());
  return c;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string opt3(const std::optional<double>& v) { return v ? fixed3(*v) : "-"; }

}  // namespace

json EvalReport::to_json() const {
  json pt = json::object();
  for (SmellType t : kAllSmells) pt[std::string(smell_id(t))] = counts_json(per_type[index_of(t)]);
  json j{{"label", label},
         {"scripts", scripts},
         {"per_type", pt},
         {"overall", counts_json(overall)},
         {"macro_f1", macro_f1}};
  auto put = [&](const char* k, const std::optional<double>& v) {
    j[k] = v ? json(*v) : json(nullptr);
  };
  put("syntax_pass_rate_low", syntax_pass_rate_low);
  put("syntax_pass_rate_high", syntax_pass_rate_high);
  put("functional_low", functional_low);
  put("functional_high", functional_high);
  j["strict"] = strict ? counts_json(*strict) : json(nullptr);
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  r.label = j.value("label", "");
  r.scripts = j.value("scripts", std::size_t{0});
  const json& pt = j.at("per_type");
  for (SmellType t : kAllSmells) {
    auto it = pt.find(std::string(smell_id(t)));
    if (it != pt.end()) r.per_type[index_of(t)] = counts_from(*it);
  }
  r.overall = counts_from(j.at("overall"));
  r.macro_f1 = j.value("macro_f1", 0.0);
  auto get = [&](const char* k) -> std::optional<double> {
    auto it = j.find(k);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
  };
  r.syntax_pass_rate_low = get("syntax_pass_rate_low");
  r.syntax_pass_rate_high = get("syntax_pass_rate_high");
  r.functional_low = get("functional_low");
  r.functional_high = get("functional_high");
  if (auto it = j.find("strict"); it != j.end() && !it->is_null()) r.strict = counts_from(*it);
  return r;
}

EvalReport score(const GroundTruthManifest& manifest,
                 const std::map<std::string, ParsedReport>& reports) {
  for (const auto& [id, rep] : reports) {
    if (!manifest.find(id)) throw UnknownScript("unknown script id in responses: " + id);
  }
  EvalReport out;
  for (const auto& e : manifest.entries) {
    std::array<int, kSmellCount> truth{};
    for (const auto& t : e.truth) ++truth[index_of(t.smell)];
    std::array<int, kSmellCount> got{};
    if (auto it = reports.find(e.script_id); it != reports.end()) got = it->second.reported;
    for (std::size_t i = 0; i < kSmellCount; ++i) {
      Counts& c = out.per_type[i];
      c.tp += std::min(truth[i], got[i]);
      c.fp += std::max(0, got[i] - truth[i]);
      c.fn += std::max(0, truth[i] - got[i]);
    }
    ++out.scripts;
  }
  double f1_sum = 0;
  for (auto& c : out.per_type) {
    c.finalize();
    out.overall.tp += c.tp;
    out.overall.fp += c.fp;
    out.overall.fn += c.fn;
    f1_sum += c.f1;
  }
  out.overall.finalize();
  // plain mean over all nine types, absent types count as 0
  out.macro_f1 = f1_sum / static_cast<double>(kSmellCount);
  return out;
}

namespace {

// (smell, target line text) for every annotation head in a response.
std::vector<std::pair<SmellType, std::string>> annotation_targets(std::string_view response) {
  static const std::regex head(R"(^\s*(#|//)\s*security\s+smell\s*!?\s*(.*)$)", std::regex::icase);
  std::vector<std::string> lines = split_lines(response);
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  std::vector<std::pair<SmellType, std::string>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, head)) continue;
    auto t = smell_from_title_prefix(m[2].str());
    if (!t) continue;
    std::size_t j = i + 1;
    while (j < lines.size()) {
      std::string_view tl = text::trim(lines[j]);
      if (!(tl.starts_with("#") || tl.starts_with("//")) || tl.empty()) break;
      ++j;
    }
    out.emplace_back(*t, j < lines.size() ? std::string(text::trim(lines[j])) : std::string());
  }
  return out;
}

}  // namespace

Counts score_strict(const GroundTruthManifest& manifest,
                    const std::map<std::string, std::string>& responses) {
  for (const auto& [id, r] : responses) {
    if (!manifest.find(id)) throw UnknownScript("unknown script id in responses: " + id);
  }
  Counts c;
  for (const auto& e : manifest.entries) {
    std::vector<std::pair<SmellType, std::string>> truth;
    for (const auto& t : e.truth) truth.emplace_back(t.smell, t.text);
    std::vector<std::pair<SmellType, std::string>> got;
    if (auto it = responses.find(e.script_id); it != responses.end()) {
      got = annotation_targets(extract_code(it->second, e.language));
    }
    std::vector<bool> used(truth.size(), false);
    for (const auto& g : got) {
      bool hit = false;
      for (std::size_t k = 0; k < truth.size(); ++k) {
        if (!used[k] && truth[k] == g) {
          used[k] = true;
          hit = true;
          break;
        }
      }
      hit ? ++c.tp : ++c.fp;
    }
    for (bool u : used) {
      if (!u) ++c.fn;
    }
  }
  c.finalize();
  return c;
}

std::string reports_to_markdown(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "| Run | Scripts | P | R | F1 | Syntax (low) | Syntax (high) | Func (low) | Func (high) |\n";
  os << "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : reports) {
    os << "| " << r.label << " | " << r.scripts << " | " << fixed3(r.overall.precision) << " | "
       << fixed3(r.overall.recall) << " | " << fixed3(r.overall.f1) << " | "
       << opt3(r.syntax_pass_rate_low) << " | " << opt3(r.syntax_pass_rate_high) << " | "
       << opt3(r.functional_low) << " | " << opt3(r.functional_high) << " |\n";
  }
  os << "\n| Run |";
  for (SmellType t : kAllSmells) os << ' ' << smell_info(t).short_label << " |";
  os << " Macro F1 |\n|---|";
  for (std::size_t i = 0; i < kSmellCount; ++i) os << "---:|";
  os << "---:|\n";
  for (const auto& r : reports) {
    os << "| " << r.label << " |";
    for (const auto& c : r.per_type) os << ' ' << fixed3(c.f1) << " |";
    os << ' ' << fixed3(r.macro_f1) << " |\n";
  }
  bool any_strict = false;
  for (const auto& r : reports) any_strict = any_strict || r.strict.has_value();
  if (any_strict) {
    os << "\n| Run | Strict P | Strict R | Strict F1 |\n|---|---:|---:|---:|\n";
    for (const auto& r : reports) {
      if (!r.strict) continue;
      os << "| " << r.label << " | " << fixed3(r.strict->precision) << " | "
         << fixed3(r.strict->recall) << " | " << fixed3(r.strict->f1) << " |\n";
    }
  }
  return os.str();
}

}  // namespace iacsmell
