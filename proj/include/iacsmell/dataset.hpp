#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacsmell/detectors.hpp"
#include "iacsmell/ir.hpp"
#include "iacsmell/smells.hpp"

namespace iacsmell {

enum class Task { Generation, Inspection };
enum class Detail { Low, High, None };
enum class InstructionSource { Template, Llm };

std::string_view to_string(Task t);
std::string_view to_string(Detail d);
/// Accepts "generation"/"gen" and "inspection"/"insp".
std::optional<Task> task_from_string(std::string_view s);
std::optional<Detail> detail_from_string(std::string_view s);

inline constexpr std::string_view kInspectionInstruction =
    "Examine the script and report any security weaknesses.";

struct DatasetRecord {
  std::string id;
  Task task = Task::Generation;
  IacLanguage language = IacLanguage::Ansible;
  Detail detail = Detail::None;
  std::string instruction;
  std::string input;
  std::string output;
  std::vector<SmellType> smells;
  std::string source_repo;
  std::string source_path;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

nlohmann::json to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const nlohmann::json& j);

/// One compact JSON object per line, LF terminated.
std::string to_jsonl(const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> records_from_jsonl(std::string_view text);

/// Builds an instruction for `script`; used for the LLM source.
using InstructionSynth = std::function<std::string(const IrScript&, Detail)>;

/// Deterministic template instruction. Low: one sentence. High: numbered
/// steps, one per unit and attribute.
std::string template_instruction(const IrScript& script, Detail detail);

/// Template source ignores `llm`; the LLM source calls it and propagates its
/// errors.
std::string synth_instruction(const IrScript& script, Detail detail, InstructionSource source,
                              const InstructionSynth& llm = {});

struct ForgeSpec {
  std::filesystem::path corpus_dir;
  std::optional<std::filesystem::path> testset_manifest;
  std::set<Task> tasks;               // empty = both
  std::set<IacLanguage> languages;    // empty = all
  double detail_split = 0.5;          // fraction of generation records at low detail
  std::optional<std::size_t> max_records;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  RuleConfig rules = RuleConfig::defaults();
};

struct ForgeStats {
  std::size_t scanned = 0;
  std::size_t clean = 0;
  std::size_t eligible = 0;
  std::size_t excluded_by_testset = 0;
  std::size_t duplicates = 0;
  std::size_t filtered_out = 0;
  std::size_t generation_low = 0;
  std::size_t generation_high = 0;
  std::size_t inspection = 0;
  std::size_t synth_failures = 0;
  std::map<std::string, std::size_t> records_per_language;
  std::map<std::string, std::size_t> smells;

  nlohmann::json to_json() const;
};

struct ForgeResult {
  std::vector<DatasetRecord> records;
  ForgeStats stats;
};

/// Throws EmptyCorpus when no IaC file is found and ManifestUnreadable when
/// the test-set manifest cannot be read.
ForgeResult forge(const ForgeSpec& spec, InstructionSource source,
                  const InstructionSynth& llm = {});

/// Seeded Fisher-Yates permutation of 0..n-1 (portable across standard
/// libraries).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace iacsmell
