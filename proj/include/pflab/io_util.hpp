#pragma once

#include <string>

namespace pflab {

/// Writes content to path atomically (temp file in the same directory, then
/// rename); creates parent directories. Partial runs never leave corrupt files.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

} // namespace pflab
