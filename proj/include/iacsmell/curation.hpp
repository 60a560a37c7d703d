#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacsmell/detectors.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/smells.hpp"

namespace iacsmell {

enum class Verdict { Keep, FalsePositive };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct ReviewDetection {
  SmellType smell = SmellType::HardCodedSecret;
  int line = 0;
  std::string evidence;
  std::string text;  // the flagged line, trimmed
  std::optional<Verdict> verdict;
};

/// One review row: a script sampled for `sampled_for`, listing every
/// detection in it so the reviewer can vet them all.
struct ReviewEntry {
  std::string script_id;
  std::string path;
  IacLanguage language = IacLanguage::Ansible;
  SmellType sampled_for = SmellType::HardCodedSecret;
  std::string sha256;
  std::string normalized_sha256;
  std::vector<ReviewDetection> detections;
};

nlohmann::json to_json(const ReviewEntry& e);
ReviewEntry review_entry_from_json(const nlohmann::json& j);
std::string review_to_jsonl(const std::vector<ReviewEntry>& entries);
/// Throws ManifestUnreadable with the 1-based row on malformed input.
std::vector<ReviewEntry> review_from_jsonl(std::string_view text);

struct SampleResult {
  std::vector<ReviewEntry> entries;
  std::array<std::size_t, kSmellCount> found{};  // scripts containing each type
  std::vector<std::string> warnings;             // InsufficientSamples notes
};

/// For each type, samples `per_type` distinct scripts that contain it.
/// A type with fewer hits contributes all of them and adds a warning.
SampleResult curate_sample(const std::filesystem::path& corpus_dir, int per_type,
                           std::uint64_t seed, const RuleConfig& rules = RuleConfig::defaults(),
                           unsigned jobs = 1);

struct FinalizeStats {
  std::size_t rows = 0;
  std::size_t scripts_reviewed = 0;   // distinct script ids
  std::size_t detections_reviewed = 0;
  std::size_t kept = 0;
  std::size_t false_positives = 0;
  std::size_t scripts_dropped = 0;
  std::size_t scripts = 0;
  std::size_t weaknesses = 0;
  std::array<std::size_t, kSmellCount> per_type{};

  nlohmann::json to_json() const;
};

struct FinalizeResult {
  GroundTruthManifest manifest;
  FinalizeStats stats;
  std::vector<std::string> warnings;
};

/// Keeps detections whose verdicts are all keep, merges rows of the same
/// script, drops scripts without truths and marks the rest verified. When
/// `script_root` is given, scripts found there get template instructions.
/// Throws MissingVerdict with the 1-based row.
FinalizeResult curate_finalize(const std::vector<ReviewEntry>& rows,
                               const std::optional<std::filesystem::path>& script_root = std::nullopt);

}  // namespace iacsmell
