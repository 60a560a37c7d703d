#pragma once

#include <string_view>

#include "iacsmell/ir.hpp"

namespace iacsmell {

// All parsers are total: malformed input yields an IrScript with
// parse_failed set and a best-effort line-level extraction, so detectors can
// still run on broken model output.

IrScript parse_ansible(std::string_view content, std::string_view path);
IrScript parse_chef(std::string_view content, std::string_view path);
IrScript parse_puppet(std::string_view content, std::string_view path);

IrScript parse_as(IacLanguage lang, std::string_view content,
                  std::string_view path);

/// Dispatches on infer_language(); UnknownLanguage propagates.
IrScript parse_any(std::string_view content, std::string_view path);

}  // namespace iacsmell
