#pragma once

#include <filesystem>
#include <string>

namespace magcomp::io {

/// Shortest decimal form that round-trips the double bit-exactly.
/// NaN is spelled "NaN".
std::string format_double(double v);

/// Parses a double, accepting "NaN" (any case); throws ValidationError on
/// trailing garbage or empty input.
double parse_double(const std::string& token, const std::string& context);

/// Writes content to a temporary file in the target directory, then renames
/// it over the destination.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_text(const std::filesystem::path& path);

}  // namespace magcomp::io
