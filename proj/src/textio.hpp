#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gubm::detail {

// Splitting never drops fields: "a,,b" gives three fields, "" gives one.
std::vector<std::string> split(const std::string& line, char sep);

// Whole-string numeric parsers; errors carry the 1-based line number.
int parse_int(const std::string& s, int line_no);
std::int64_t parse_i64(const std::string& s, int line_no);
std::uint64_t parse_u64(const std::string& s, int line_no);
double parse_double(const std::string& s, int line_no);

}  // namespace gubm::detail
