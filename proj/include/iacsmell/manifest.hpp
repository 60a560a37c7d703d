#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacsmell/ir.hpp"
#include "iacsmell/smells.hpp"

namespace iacsmell {

struct TruthItem {
  SmellType smell = SmellType::HardCodedSecret;
  int line = 0;       // 1-based line in the original script
  std::string text;   // that line, trimmed

  friend bool operator==(const TruthItem&, const TruthItem&) = default;
};

struct ManifestEntry {
  std::string script_id;
  std::string path;
  IacLanguage language = IacLanguage::Ansible;
  std::string sha256;
  std::string normalized_sha256;
  std::optional<std::string> instruction_low;
  std::optional<std::string> instruction_high;
  std::vector<TruthItem> truth;
  bool verified = false;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct GroundTruthManifest {
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(const std::string& script_id) const;
  std::size_t weakness_count() const;
};

nlohmann::json to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

std::string manifest_to_jsonl(const GroundTruthManifest& m);
/// Throws ManifestUnreadable on I/O or format errors.
GroundTruthManifest read_manifest(const std::filesystem::path& path);
GroundTruthManifest manifest_from_jsonl(std::string_view text);
void write_manifest(const std::filesystem::path& path, const GroundTruthManifest& m);

/// Resolves an entry path: as given, else relative to `manifest_dir`.
std::filesystem::path resolve_script_path(const ManifestEntry& e,
                                          const std::filesystem::path& manifest_dir);

}  // namespace iacsmell
