#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacsmell/detectors.hpp"
#include "iacsmell/ir.hpp"

namespace iacsmell {

struct FileReport {
  std::string path;
  IacLanguage language = IacLanguage::Ansible;
  std::vector<Detection> detections;
  bool parse_failed = false;
  std::optional<ParseError> parse_error;
};

nlohmann::json detection_to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

/// Flat JSON array, one object per detection, in file order.
nlohmann::json detections_to_json(const std::vector<FileReport>& files);

/// SARIF 2.1.0 log with one run; rule ids are "IAC-CWE-<n>".
nlohmann::json detections_to_sarif(const std::vector<FileReport>& files,
                                   const std::string& tool_version);

/// `path:line:col: IAC-CWE-n Title: evidence`, one line per detection.
std::string detections_to_text(const std::vector<FileReport>& files);

}  // namespace iacsmell
