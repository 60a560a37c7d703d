#pragma once

#include <string_view>

#include "iacsmell/ir.hpp"

namespace iacsmell::detail {

/// Fills language, path, hash, lines and the UTF-8 flag.
IrScript start_script(IacLanguage lang, std::string_view content,
                      std::string_view path);

/// Clamps spans into the line range, orders children by source position and
/// sets annotation flags.
void finish_script(IrScript& script);

IrComment make_comment(std::string_view body, int line, int col);

/// Line-level fallback for Chef and Puppet: every `#` comment and every
/// `k => v`, `k: v`, `k = v` or `k v` line from `from_line` on is kept, the
/// bindings inside one "degraded" unit.
void extract_lines(IrScript& script, int from_line);

}  // namespace iacsmell::detail
