#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iacsmell/detectors.hpp"
#include "iacsmell/ir.hpp"

namespace iacsmell {

inline constexpr std::size_t kAnnotationWidth = 72;

/// "Security smell! <Title>: <advice>"
std::string annotation_text(SmellType smell);

/// The comment lines for one annotation, wrapped at kAnnotationWidth columns.
/// No line terminators; `indent` is copied in front of every line.
std::vector<std::string> annotation_lines(SmellType smell, std::string_view indent);

/// Inserts one annotation block above each detection's start line. Lines that
/// already carry a matching block directly above them are left alone, so
/// annotating twice changes nothing. Throws SpanOutOfRange.
std::string annotate(const IrScript& script, const std::vector<Detection>& detections);

/// Removes every annotation block (header plus wrapped continuation lines).
std::string strip_annotations(std::string_view content);

/// A recognized annotation block; lines are 0-based and inclusive.
struct AnnotationBlock {
  std::size_t first = 0;
  std::size_t last = 0;
  std::optional<SmellType> smell;  // empty when the title is not recognized
};

std::vector<AnnotationBlock> find_annotation_blocks(const std::vector<std::string>& lines);

}  // namespace iacsmell
