#include "iacsmell/report.hpp"

#include <algorithm>

#include "iacsmell/error.hpp"

namespace iacsmell {

using nlohmann::json;

json detection_to_json(const Detection& d) {
  const SmellInfo& info = smell_info(d.smell);
  return json{{"smell", info.id},
              {"cwe", info.cwe},
              {"rule_id", rule_id(d.smell)},
              {"title", info.title},
              {"start_line", d.span.start_line},
              {"end_line", d.span.end_line},
              {"start_col", d.span.start_col},
              {"evidence", d.evidence},
              {"message", d.message}};
}

Detection detection_from_json(const json& j) {
  Detection d;
  auto smell = smell_from_string(j.at("smell").get<std::string>());
  if (!smell) throw Error("unknown smell '" + j.at("smell").get<std::string>() + "'");
  d.smell = *smell;
  d.span.start_line = j.at("start_line").get<int>();
  d.span.end_line = j.value("end_line", d.span.start_line);
  d.span.start_col = j.value("start_col", 0);
  d.evidence = j.value("evidence", "");
  d.message = j.value("message", std::string(smell_advice(d.smell)));
  return d;
}

json detections_to_json(const std::vector<FileReport>& files) {
  json out = json::array();
  for (const auto& f : files) {
    for (const auto& d : f.detections) {
      json j = detection_to_json(d);
      j["path"] = f.path;
      j["language"] = std::string(to_string(f.language));
      out.push_back(std::move(j));
    }
  }
  return out;
}

json detections_to_sarif(const std::vector<FileReport>& files,
                         const std::string& tool_version) {
  json rules = json::array();
  for (SmellType t : kAllSmells) {
    const SmellInfo& info = smell_info(t);
    rules.push_back(json{
        {"id", rule_id(t)},
        {"name", info.id},
        {"shortDescription", {{"text", info.title}}},
        {"fullDescription", {{"text", std::string(info.title) + " (CWE-" +
                                          std::to_string(info.cwe) + ")"}}},
        {"help", {{"text", info.advice}}},
        {"helpUri", "https://cwe.mitre.org/data/definitions/" +
                        std::to_string(info.cwe) + ".html"},
        {"defaultConfiguration", {{"level", "warning"}}},
        {"properties", json{{"tags", json::array({"security", "CWE-" + std::to_string(info.cwe)})}}}});
  }

  json results = json::array();
  json artifacts = json::array();
  for (const auto& f : files) {
    artifacts.push_back(json{{"location", {{"uri", f.path}}}});
    for (const auto& d : f.detections) {
      json region{{"startLine", d.span.start_line}, {"endLine", d.span.end_line}};
      if (d.span.start_col > 0) region["startColumn"] = d.span.start_col;
      results.push_back(json{
          {"ruleId", rule_id(d.smell)},
          {"ruleIndex", index_of(d.smell)},
          {"level", "warning"},
          {"message", {{"text", std::string(smell_title(d.smell)) + ": " + d.message}}},
          {"locations", json::array({json{{"physicalLocation",
                                           json{{"artifactLocation", json{{"uri", f.path}}},
                                                {"region", region}}}}})},
          {"properties", {{"evidence", d.evidence}}}});
    }
  }

  json driver{{"name", "iacsmell"},
              {"version", tool_version},
              {"informationUri", "https://cwe.mitre.org/"},
              {"rules", rules}};
  json run{{"tool", json{{"driver", driver}}},
           {"artifacts", artifacts},
           {"results", results}};
  return json{{"$schema", "https://json.schemastore.org/sarif-2.1.0.json"},
              {"version", "2.1.0"},
              {"runs", json::array({run})}};
}

std::string detections_to_text(const std::vector<FileReport>& files) {
  std::string out;
  for (const auto& f : files) {
    if (f.parse_failed && f.parse_error) {
      out += f.path + ":" + std::to_string(f.parse_error->line) +
             ": note: parsed in degraded mode (" + f.parse_error->reason + ")\n";
    }
    for (const auto& d : f.detections) {
      out += f.path + ":" + std::to_string(d.span.start_line) + ":" +
             std::to_string(std::max(d.span.start_col, 1)) + ": " + rule_id(d.smell) +
             " " + std::string(smell_title(d.smell)) + ": " + d.evidence + "\n";
    }
  }
  return out;
}

}  // namespace iacsmell
