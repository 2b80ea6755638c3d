#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tailgini {

// Doubles serialized with 17 significant digits so the decimal text
// round-trips to the identical bit pattern.
std::string format_double(double v);

double parse_double(const std::string& s, const std::string& context);

// Writes content to path atomically: a temporary sibling file is written
// and then renamed over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::vector<std::string> split(const std::string& line, char delim);

std::string trim(const std::string& s);

// Reads a delimited text file, verifies the exact header, and returns the
// data rows split into fields. Blank lines are ignored.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::string& expected_header, char delim);

} // namespace tailgini
