#pragma once

#include <string>
#include <vector>

namespace dygcl {

// 17 significant digits: enough for double round-trip.
std::string format_g17(double x);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace dygcl
