#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iacsmell/detectors.hpp"
#include "iacsmell/ir.hpp"

namespace iacsmell {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Recursively lists .yml/.yaml/.rb/.pp files under `root`, sorted by their
/// generic path. A plain file argument is returned as-is.
std::vector<std::filesystem::path> list_iac_files(const std::filesystem::path& root);

struct ScannedFile {
  std::filesystem::path path;
  std::string content;
  IrScript script;
  std::vector<Detection> detections;
};

/// Parses and scans every file, `jobs` at a time. Output order follows
/// `files` regardless of `jobs`. Unreadable files or files whose language
/// cannot be inferred rethrow the first such error after all workers stop.
std::vector<ScannedFile> scan_files(const std::vector<std::filesystem::path>& files,
                                    const RuleConfig& cfg, unsigned jobs = 1,
                                    std::optional<IacLanguage> forced = std::nullopt);

/// `path` relative to `base` in generic form, or the generic path itself when
/// it is not below `base`.
std::string relative_id(const std::filesystem::path& path, const std::filesystem::path& base);

}  // namespace iacsmell
