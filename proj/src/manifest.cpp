#include "iacsmell/manifest.hpp"

#include "iacsmell/corpus.hpp"
#include "iacsmell/error.hpp"

namespace iacsmell {

using nlohmann::json;

const ManifestEntry* GroundTruthManifest::find(const std::string& script_id) const {
  for (const auto& e : entries) {
    if (e.script_id == script_id) return &e;
  }
  return nullptr;
}

std::size_t GroundTruthManifest::weakness_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.truth.size();
  return n;
}

json to_json(const ManifestEntry& e) {
  json truth = json::array();
  for (const auto& t : e.truth) {
    truth.push_back(json{{"smell", smell_id(t.smell)}, {"line", t.line}, {"text", t.text}});
  }
  json instr = json::object();
  if (e.instruction_low) instr["low"] = *e.instruction_low;
  if (e.instruction_high) instr["high"] = *e.instruction_high;
  return json{{"script_id", e.script_id},
              {"path", e.path},
              {"language", std::string(to_string(e.language))},
              {"sha256", e.sha256},
              {"normalized_sha256", e.normalized_sha256},
              {"task_instructions", instr},
              {"truth", truth},
              {"verified", e.verified}};
}

ManifestEntry manifest_entry_from_json(const json& j) {
  ManifestEntry e;
  e.script_id = j.at("script_id").get<std::string>();
  e.path = j.value("path", e.script_id);
  auto lang = language_from_string(j.at("language").get<std::string>());
  if (!lang) throw ManifestUnreadable("unknown language in entry " + e.script_id);
  e.language = *lang;
  e.sha256 = j.value("sha256", "");
  e.normalized_sha256 = j.value("normalized_sha256", "");
  if (j.contains("task_instructions") && j["task_instructions"].is_object()) {
    const json& ti = j["task_instructions"];
    if (ti.contains("low") && ti["low"].is_string()) e.instruction_low = ti["low"].get<std::string>();
    if (ti.contains("high") && ti["high"].is_string()) e.instruction_high = ti["high"].get<std::string>();
  }
  for (const auto& t : j.value("truth", json::array())) {
    auto smell = smell_from_string(t.at("smell").get<std::string>());
    if (!smell) throw ManifestUnreadable("unknown smell in entry " + e.script_id);
    e.truth.push_back(TruthItem{*smell, t.value("line", 0), t.value("text", "")});
  }
  e.verified = j.value("verified", false);
  return e;
}

std::string manifest_to_jsonl(const GroundTruthManifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    out += to_json(e).dump();
    out.push_back('\n');
  }
  return out;
}

GroundTruthManifest manifest_from_jsonl(std::string_view text) {
  GroundTruthManifest m;
  std::size_t row = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      m.entries.push_back(manifest_entry_from_json(json::parse(line)));
    } catch (const ManifestUnreadable&) {
      throw;
    } catch (const std::exception& ex) {
      throw ManifestUnreadable("manifest row " + std::to_string(row) + ": " + ex.what());
    }
  }
  return m;
}

GroundTruthManifest read_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& ex) {
    throw ManifestUnreadable(ex.what());
  }
  return manifest_from_jsonl(text);
}

void write_manifest(const std::filesystem::path& path, const GroundTruthManifest& m) {
  write_file(path, manifest_to_jsonl(m));
}

std::filesystem::path resolve_script_path(const ManifestEntry& e,
                                          const std::filesystem::path& manifest_dir) {
  std::filesystem::path p(e.path);
  if (p.is_absolute() || std::filesystem::exists(p)) return p;
  std::filesystem::path alt = manifest_dir / p;
  if (std::filesystem::exists(alt)) return alt;
  return p;
}

}  // namespace iacsmell
