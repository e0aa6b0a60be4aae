#include "textio.hpp"

#include <stdexcept>

#include "gubm/errors.hpp"

namespace gubm::detail {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t at = line.find(sep, start);
    if (at == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, at - start));
    start = at + 1;
  }
  return fields;
}

namespace {

template <typename T, typename Parse>
T parse_whole(const std::string& s, int line_no, const char* what,
              Parse parse) {
  try {
    std::size_t pos = 0;
    T v = parse(s, &pos);
    if (pos != s.size() || s.empty()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": expected " + what +
                    ", got '" + s + "'");
  }
}

}  // namespace

int parse_int(const std::string& s, int line_no) {
  return parse_whole<int>(s, line_no, "integer", [](const std::string& t,
                                                    std::size_t* pos) {
    return std::stoi(t, pos);
  });
}

std::int64_t parse_i64(const std::string& s, int line_no) {
  return parse_whole<std::int64_t>(
      s, line_no, "integer",
      [](const std::string& t, std::size_t* pos) { return std::stoll(t, pos); });
}

std::uint64_t parse_u64(const std::string& s, int line_no) {
  if (!s.empty() && s[0] == '-') {
    throw DataError("line " + std::to_string(line_no) +
                    ": expected non-negative integer, got '" + s + "'");
  }
  return parse_whole<std::uint64_t>(
      s, line_no, "non-negative integer",
      [](const std::string& t, std::size_t* pos) { return std::stoull(t, pos); });
}

double parse_double(const std::string& s, int line_no) {
  return parse_whole<double>(
      s, line_no, "number",
      [](const std::string& t, std::size_t* pos) { return std::stod(t, pos); });
}

}  // namespace gubm::detail
