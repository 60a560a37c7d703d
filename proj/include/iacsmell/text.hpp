#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iacsmell::text {

std::string lower(std::string_view s);
std::string_view trim(std::string_view s);
std::string_view ltrim(std::string_view s);
std::string_view rtrim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Leading spaces and tabs of a line.
std::string_view indentation(std::string_view line);

/// Removes one pair of matching surrounding quotes ('...' or "...").
std::string_view unquote(std::string_view s);

/// Case-insensitive search for `token` where the characters on either side
/// are not ASCII letters or digits. Underscore and '-' count as separators.
bool contains_word(std::string_view haystack, std::string_view token);

/// Truncates to at most `max_chars` bytes on a UTF-8 boundary, appending
/// "..." when shortened.
std::string excerpt(std::string_view s, std::size_t max_chars);

bool ends_with_ci(std::string_view s, std::string_view suffix);

}  // namespace iacsmell::text
